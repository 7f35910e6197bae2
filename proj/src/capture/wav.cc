#include "skylisten/capture/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

namespace skylisten::capture {

namespace {

void Put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void Put32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t Get16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t Get32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool Tag(const std::uint8_t* p, const char* tag) {
  return std::equal(p, p + 4, reinterpret_cast<const std::uint8_t*>(tag));
}

}  // namespace

std::array<std::uint8_t, kWavHeaderBytes> WavHeader(std::size_t n_samples) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n_samples * 2);
  std::array<std::uint8_t, kWavHeaderBytes> h{};
  std::copy_n("RIFF", 4, h.begin());
  Put32(&h[4], 36 + data_bytes);
  std::copy_n("WAVE", 4, h.begin() + 8);
  std::copy_n("fmt ", 4, h.begin() + 12);
  Put32(&h[16], 16);
  Put16(&h[20], 1);  // PCM
  Put16(&h[22], 1);
  Put32(&h[24], kSampleRateHz);
  Put32(&h[28], kSampleRateHz * 2);
  Put16(&h[32], 2);
  Put16(&h[34], 16);
  std::copy_n("data", 4, h.begin() + 36);
  Put32(&h[40], data_bytes);
  return h;
}

std::vector<std::uint8_t> EncodeWav(const AudioClip& clip) {
  if (clip.sample_rate_hz != kSampleRateHz || clip.channels != 1) {
    throw CaptureError(CaptureErrc::kUnsupportedFormat,
                       "only 22050 Hz mono clips can be written");
  }
  const auto header = WavHeader(clip.samples.size());
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.resize(kWavHeaderBytes + 2 * clip.samples.size());
  std::uint8_t* p = out.data() + kWavHeaderBytes;
  for (std::int16_t s : clip.samples) {
    Put16(p, static_cast<std::uint16_t>(s));
    p += 2;
  }
  return out;
}

AudioClip DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !Tag(bytes.data(), "RIFF") || !Tag(bytes.data() + 8, "WAVE")) {
    throw CaptureError(CaptureErrc::kNotRiff, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = Get32(chunk + 4);
    const std::size_t body = pos + 8;
    if (Tag(chunk, "fmt ")) {
      if (size < 16 || body + 16 > bytes.size()) {
        throw CaptureError(CaptureErrc::kNotRiff, "truncated fmt chunk");
      }
      const std::uint8_t* f = bytes.data() + body;
      const int format = Get16(f);
      const int channels = Get16(f + 2);
      const std::uint32_t rate = Get32(f + 4);
      const int bits = Get16(f + 14);
      if (format != 1 || channels != 1 || rate != kSampleRateHz || bits != 16) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "expected PCM mono 16-bit 22050 Hz, got format %d, %d channels, %u Hz, %d bits",
                      format, channels, rate, bits);
        throw CaptureError(CaptureErrc::kUnsupportedFormat, msg);
      }
      have_fmt = true;
    } else if (Tag(chunk, "data")) {
      if (!have_fmt) throw CaptureError(CaptureErrc::kNotRiff, "data chunk before fmt chunk");
      if (body + size > bytes.size()) throw CaptureError(CaptureErrc::kNotRiff, "truncated data chunk");
      AudioClip clip;
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        clip.samples[i] = static_cast<std::int16_t>(Get16(bytes.data() + body + 2 * i));
      }
      return clip;
    }
    pos = body + size + (size & 1);
  }
  throw CaptureError(CaptureErrc::kNotRiff, "no data chunk");
}

void WriteWav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = EncodeWav(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CaptureError(CaptureErrc::kIoFailure, "cannot write " + path.string());
}

AudioClip ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaptureError(CaptureErrc::kIoFailure, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const CaptureError& e) {
    throw CaptureError(e.code(), path.string() + ": " + e.what());
  }
}

AudioClip Trim(const AudioClip& clip, double start_s, double end_s) {
  if (!(start_s >= 0.0 && start_s < end_s && end_s <= clip.duration_s() + 1e-9)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "bad trim range [%g, %g) for a %g s clip", start_s, end_s,
                  clip.duration_s());
    throw CaptureError(CaptureErrc::kBadRange, msg);
  }
  const auto rate = static_cast<double>(clip.sample_rate_hz);
  const auto first = static_cast<std::size_t>(std::llround(start_s * rate));
  const auto last = std::min(clip.samples.size(), static_cast<std::size_t>(std::llround(end_s * rate)));
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.channels = clip.channels;
  out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

}  // namespace skylisten::capture
