#ifndef SKYLISTEN_CAPTURE_SOURCE_H_
#define SKYLISTEN_CAPTURE_SOURCE_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "skylisten/capture/wav.h"

namespace skylisten::capture {

// Pull-based sample stream. Pull fills the whole block unless the stream has
// ended, in which case it returns how many samples it did write.
class AudioSource {
 public:
  virtual ~AudioSource() = default;
  virtual std::size_t Pull(std::span<std::int16_t> block) = 0;
};

class SineSource : public AudioSource {
 public:
  SineSource(double frequency_hz, double amplitude);
  std::size_t Pull(std::span<std::int16_t> block) override;

 private:
  double frequency_hz_;
  double amplitude_;
  std::uint64_t n_ = 0;
};

// Uniform white noise in [-amplitude, amplitude].
class NoiseSource : public AudioSource {
 public:
  NoiseSource(std::uint64_t seed, double amplitude);
  std::size_t Pull(std::span<std::int16_t> block) override;

 private:
  std::mt19937_64 rng_;
  double amplitude_;
};

class ToneInNoiseSource : public AudioSource {
 public:
  ToneInNoiseSource(double frequency_hz, double tone_amplitude,
                    std::uint64_t seed, double noise_amplitude);
  std::size_t Pull(std::span<std::int16_t> block) override;

 private:
  double frequency_hz_;
  double tone_amplitude_;
  std::mt19937_64 rng_;
  double noise_amplitude_;
  std::uint64_t n_ = 0;
};

class VectorSource : public AudioSource {
 public:
  explicit VectorSource(std::vector<std::int16_t> samples);
  std::size_t Pull(std::span<std::int16_t> block) override;

 private:
  std::vector<std::int16_t> samples_;
  std::size_t pos_ = 0;
};

class WavFileSource : public AudioSource {
 public:
  explicit WavFileSource(const std::filesystem::path& path);
  std::size_t Pull(std::span<std::int16_t> block) override;

 private:
  VectorSource inner_;
};

}  // namespace skylisten::capture

#endif  // SKYLISTEN_CAPTURE_SOURCE_H_
