#include "skylisten/capture/source.h"

#include <algorithm>
#include <cmath>

namespace skylisten::capture {

namespace {

std::int16_t Clamp16(double v) {
  return static_cast<std::int16_t>(std::clamp(std::lround(v), -32768L, 32767L));
}

// Spelled out rather than std::uniform_real_distribution so the stream is
// the same on every standard library.
double UnitNoise(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double Phase(double frequency_hz, std::uint64_t n) {
  return 2.0 * M_PI * frequency_hz * static_cast<double>(n) / kSampleRateHz;
}

}  // namespace

SineSource::SineSource(double frequency_hz, double amplitude)
    : frequency_hz_(frequency_hz), amplitude_(amplitude) {}

std::size_t SineSource::Pull(std::span<std::int16_t> block) {
  for (auto& s : block) s = Clamp16(amplitude_ * std::sin(Phase(frequency_hz_, n_++)));
  return block.size();
}

NoiseSource::NoiseSource(std::uint64_t seed, double amplitude)
    : rng_(seed), amplitude_(amplitude) {}

std::size_t NoiseSource::Pull(std::span<std::int16_t> block) {
  for (auto& s : block) s = Clamp16(amplitude_ * UnitNoise(rng_));
  return block.size();
}

ToneInNoiseSource::ToneInNoiseSource(double frequency_hz, double tone_amplitude,
                                     std::uint64_t seed, double noise_amplitude)
    : frequency_hz_(frequency_hz),
      tone_amplitude_(tone_amplitude),
      rng_(seed),
      noise_amplitude_(noise_amplitude) {}

std::size_t ToneInNoiseSource::Pull(std::span<std::int16_t> block) {
  for (auto& s : block) {
    const double tone = tone_amplitude_ * std::sin(Phase(frequency_hz_, n_++));
    s = Clamp16(tone + noise_amplitude_ * UnitNoise(rng_));
  }
  return block.size();
}

VectorSource::VectorSource(std::vector<std::int16_t> samples) : samples_(std::move(samples)) {}

std::size_t VectorSource::Pull(std::span<std::int16_t> block) {
  const std::size_t n = std::min(block.size(), samples_.size() - pos_);
  std::copy_n(samples_.begin() + static_cast<std::ptrdiff_t>(pos_), n, block.begin());
  pos_ += n;
  return n;
}

WavFileSource::WavFileSource(const std::filesystem::path& path)
    : inner_(ReadWav(path).samples) {}

std::size_t WavFileSource::Pull(std::span<std::int16_t> block) { return inner_.Pull(block); }

}  // namespace skylisten::capture
