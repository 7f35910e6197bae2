#ifndef SKYLISTEN_FEATURES_MFCC_H_
#define SKYLISTEN_FEATURES_MFCC_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "skylisten/error.h"

namespace skylisten::features {

enum class FeatureErrc { kEmptyInput, kBadBand, kNonFinite, kBadCache };
using FeatureError = CodedError<FeatureErrc>;

inline constexpr int kSampleRateHz = 22050;
inline constexpr int kWindow = 2048;
inline constexpr int kHop = 512;
inline constexpr int kBins = kWindow / 2 + 1;  // 1025
inline constexpr int kMels = 128;
inline constexpr int kCoeffs = 13;
inline constexpr int kSegmentFrames = 216;
inline constexpr double kLogFloor = 1e-10;

// Row-major real matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Periodic Hann window of the given length.
std::vector<double> HannWindow(int length);

// frames x 1025 power spectrogram. Frames are centred: the signal is
// reflection-padded by window/2 on each side, giving 1 + floor(N/hop) frames.
Matrix StftPower(std::span<const double> samples, int window = kWindow, int hop = kHop);

double HzToMel(double hz);  // Slaney scale: linear to 1 kHz, log above
double MelToHz(double mel);

// n_mels x n_bins triangular filters, area-normalized (2 / bandwidth).
Matrix MelFilterbank(int n_mels = kMels, double f_min = 0.0, double f_max = kSampleRateHz / 2.0,
                     int n_bins = kBins, int sample_rate_hz = kSampleRateHz);

// Orthonormal DCT-II.
std::vector<double> Dct2Ortho(std::span<const double> v);

// 13 x frames: coefficient-major, one column per STFT frame.
struct FeatureMatrix {
  std::string source;
  Matrix coeffs;
};

// power -> mel -> 10*log10(max(x, 1e-10)) -> DCT-II per frame, first 13.
FeatureMatrix Mfcc(std::span<const double> samples, std::string source = "");

// Binary cache of 13 x 216 segment matrices: "SKYMFCC\0" magic, u32
// version, u64 count, then per segment u32 id length, id bytes and 13*216
// f64 in coefficient-major order, all little-endian.
void WriteFeatureCache(const std::filesystem::path& path, const std::vector<FeatureMatrix>& items);
std::vector<FeatureMatrix> ReadFeatureCache(const std::filesystem::path& path);

}  // namespace skylisten::features

#endif  // SKYLISTEN_FEATURES_MFCC_H_
