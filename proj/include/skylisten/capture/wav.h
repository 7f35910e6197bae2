#ifndef SKYLISTEN_CAPTURE_WAV_H_
#define SKYLISTEN_CAPTURE_WAV_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "skylisten/error.h"

namespace skylisten::capture {

enum class CaptureErrc {
  kNotRiff,
  kUnsupportedFormat,
  kSourceUnderrun,
  kIoFailure,
  kBadRange,
};
using CaptureError = CodedError<CaptureErrc>;

inline constexpr int kSampleRateHz = 22050;
inline constexpr std::size_t kWavHeaderBytes = 44;

// Mono 16-bit PCM at 22050 Hz. Anything else is rejected on read.
struct AudioClip {
  std::vector<std::int16_t> samples;
  int sample_rate_hz = kSampleRateHz;
  int channels = 1;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

// Canonical RIFF/WAVE header: fmt chunk of 16 bytes, data chunk directly
// after it.
std::array<std::uint8_t, kWavHeaderBytes> WavHeader(std::size_t n_samples);

std::vector<std::uint8_t> EncodeWav(const AudioClip& clip);
// Walks the chunk list, so extra chunks (LIST, fact, ...) are skipped.
AudioClip DecodeWav(std::span<const std::uint8_t> bytes);

void WriteWav(const std::filesystem::path& path, const AudioClip& clip);
AudioClip ReadWav(const std::filesystem::path& path);

// Samples [round(start_s * rate), round(end_s * rate)).
AudioClip Trim(const AudioClip& clip, double start_s, double end_s);

}  // namespace skylisten::capture

#endif  // SKYLISTEN_CAPTURE_WAV_H_
