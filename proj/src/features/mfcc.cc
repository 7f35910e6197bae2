#include "skylisten/features/mfcc.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "skylisten/features/fft.h"

namespace skylisten::features {

namespace {

constexpr double kMinLogHz = 1000.0;
constexpr double kLinearStep = 200.0 / 3.0;
constexpr double kMinLogMel = kMinLogHz / kLinearStep;  // 15

double LogStep() { return std::log(6.4) / 27.0; }

// numpy-style "reflect" padding index (edge sample not repeated).
std::size_t Reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<std::ptrdiff_t>(n) ? i : period - i);
}

struct SparseFilter {
  int first = 0;
  std::vector<double> weights;
};

const std::vector<SparseFilter>& DefaultFilters() {
  static const std::vector<SparseFilter> filters = [] {
    const Matrix fb = MelFilterbank();
    std::vector<SparseFilter> out(fb.rows);
    for (int m = 0; m < fb.rows; ++m) {
      int lo = 0, hi = fb.cols - 1;
      while (lo < fb.cols && fb.at(m, lo) == 0.0) ++lo;
      while (hi > lo && fb.at(m, hi) == 0.0) --hi;
      out[m].first = lo;
      for (int k = lo; k <= hi; ++k) out[m].weights.push_back(fb.at(m, k));
    }
    return out;
  }();
  return filters;
}

void PutLe(std::ofstream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>(v >> (8 * i));
  out.write(buf, bytes);
}

std::uint64_t GetLe(const std::vector<std::uint8_t>& b, std::size_t& pos, int bytes) {
  if (pos + bytes > b.size()) throw FeatureError(FeatureErrc::kBadCache, "feature cache is truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[pos + i]) << (8 * i);
  pos += bytes;
  return v;
}

constexpr char kMagic[8] = {'S', 'K', 'Y', 'M', 'F', 'C', 'C', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / length);
  return w;
}

Matrix StftPower(std::span<const double> samples, int window, int hop) {
  if (samples.empty()) throw FeatureError(FeatureErrc::kEmptyInput, "stft of an empty signal");
  if (!IsPowerOfTwo(static_cast<std::size_t>(window)) || hop <= 0) {
    throw FeatureError(FeatureErrc::kBadBand, "window must be a power of two and hop positive");
  }
  const std::size_t n = samples.size();
  const int frames = 1 + static_cast<int>(n / static_cast<std::size_t>(hop));
  const int bins = window / 2 + 1;
  const auto hann = HannWindow(window);
  const std::ptrdiff_t pad = window / 2;
  Matrix out(frames, bins);
  std::vector<std::complex<double>> buf(window);
  for (int t = 0; t < frames; ++t) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * hop - pad;
    for (int k = 0; k < window; ++k) {
      buf[k] = samples[Reflect(start + k, n)] * hann[k];
    }
    Fft(buf);
    for (int k = 0; k < bins; ++k) out.at(t, k) = std::norm(buf[k]);
  }
  return out;
}

double HzToMel(double hz) {
  if (hz < kMinLogHz) return hz / kLinearStep;
  return kMinLogMel + std::log(hz / kMinLogHz) / LogStep();
}

double MelToHz(double mel) {
  if (mel < kMinLogMel) return mel * kLinearStep;
  return kMinLogHz * std::exp(LogStep() * (mel - kMinLogMel));
}

Matrix MelFilterbank(int n_mels, double f_min, double f_max, int n_bins, int sample_rate_hz) {
  if (n_mels < 1 || n_bins < 2 || !(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate_hz / 2.0)) {
    throw FeatureError(FeatureErrc::kBadBand, "mel band must satisfy 0 <= f_min < f_max <= rate/2");
  }
  const double mel_lo = HzToMel(f_min);
  const double mel_hi = HzToMel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  const double bin_hz = sample_rate_hz / 2.0 / (n_bins - 1);
  Matrix fb(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      fb.at(m, k) = std::max(0.0, std::min(rising, falling)) * norm;
    }
  }
  return fb;
}

std::vector<double> Dct2Ortho(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> y(n);
  if (n == 0) return y;
  if (IsPowerOfTwo(n)) {
    // Even samples forward, odd samples mirrored, then one complex FFT.
    std::vector<std::complex<double>> v(n);
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) v[k] = x[2 * k];
    for (std::size_t k = 0; k < n / 2; ++k) v[n - 1 - k] = x[2 * k + 1];
    Fft(v);
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = -M_PI * static_cast<double>(k) / (2.0 * static_cast<double>(n));
      y[k] = (v[k] * std::complex<double>(std::cos(angle), std::sin(angle))).real();
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x[i] * std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
      y[k] = s;
    }
  }
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  y[0] *= s0;
  for (std::size_t k = 1; k < n; ++k) y[k] *= sk;
  return y;
}

FeatureMatrix Mfcc(std::span<const double> samples, std::string source) {
  for (double s : samples) {
    if (!std::isfinite(s)) throw FeatureError(FeatureErrc::kNonFinite, "non-finite sample in " + source);
  }
  const Matrix power = StftPower(samples);
  const auto& filters = DefaultFilters();
  FeatureMatrix out{std::move(source), Matrix(kCoeffs, power.rows)};
  std::vector<double> log_mel(kMels);
  for (int t = 0; t < power.rows; ++t) {
    const double* row = &power.data[static_cast<std::size_t>(t) * power.cols];
    for (int m = 0; m < kMels; ++m) {
      double e = 0.0;
      const auto& f = filters[m];
      for (std::size_t k = 0; k < f.weights.size(); ++k) e += f.weights[k] * row[f.first + k];
      log_mel[m] = 10.0 * std::log10(std::max(e, kLogFloor));
    }
    const auto c = Dct2Ortho(log_mel);
    for (int i = 0; i < kCoeffs; ++i) out.coeffs.at(i, t) = c[i];
  }
  return out;
}

void WriteFeatureCache(const std::filesystem::path& path, const std::vector<FeatureMatrix>& items) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FeatureError(FeatureErrc::kBadCache, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  PutLe(out, kCacheVersion, 4);
  PutLe(out, items.size(), 8);
  for (const auto& item : items) {
    if (item.coeffs.rows != kCoeffs || item.coeffs.cols != kSegmentFrames) {
      throw FeatureError(FeatureErrc::kBadCache, item.source + ": cache holds 13 x 216 matrices only");
    }
    PutLe(out, item.source.size(), 4);
    out.write(item.source.data(), static_cast<std::streamsize>(item.source.size()));
    for (double v : item.coeffs.data) PutLe(out, std::bit_cast<std::uint64_t>(v), 8);
  }
  if (!out) throw FeatureError(FeatureErrc::kBadCache, "cannot write " + path.string());
}

std::vector<FeatureMatrix> ReadFeatureCache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeatureError(FeatureErrc::kBadCache, "cannot open " + path.string());
  const std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (b.size() < sizeof kMagic || std::memcmp(b.data(), kMagic, sizeof kMagic) != 0) {
    throw FeatureError(FeatureErrc::kBadCache, path.string() + " is not a feature cache");
  }
  std::size_t pos = sizeof kMagic;
  if (GetLe(b, pos, 4) != kCacheVersion) throw FeatureError(FeatureErrc::kBadCache, "unsupported cache version");
  const std::uint64_t count = GetLe(b, pos, 8);
  std::vector<FeatureMatrix> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = static_cast<std::size_t>(GetLe(b, pos, 4));
    if (pos + len > b.size()) throw FeatureError(FeatureErrc::kBadCache, "feature cache is truncated");
    FeatureMatrix m{std::string(b.begin() + static_cast<std::ptrdiff_t>(pos),
                                b.begin() + static_cast<std::ptrdiff_t>(pos + len)),
                    Matrix(kCoeffs, kSegmentFrames)};
    pos += len;
    for (double& v : m.coeffs.data) v = std::bit_cast<double>(GetLe(b, pos, 8));
    out.push_back(std::move(m));
  }
  if (pos != b.size()) throw FeatureError(FeatureErrc::kBadCache, "trailing bytes in feature cache");
  return out;
}

}  // namespace skylisten::features
