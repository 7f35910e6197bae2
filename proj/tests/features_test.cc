#include <cmath>
#include <complex>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "skylisten/features/fft.h"
#include "skylisten/features/mfcc.h"

using namespace skylisten;
using features::Matrix;

namespace {

std::vector<double> DirectDct(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * std::cos(M_PIl * k * (2 * i + 1) / (2.0L * n));
    y[k] = static_cast<double>(s * std::sqrt((k == 0 ? 1.0L : 2.0L) / n));
  }
  return y;
}

std::vector<double> Noise(std::size_t n, unsigned seed, double amp = 0.3) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("fft against a direct dft") {
  auto x = Noise(64, 1);
  std::vector<std::complex<double>> a(x.begin(), x.end());
  features::Fft(a);
  for (int k = 0; k < 64; ++k) {
    std::complex<double> s = 0;
    for (int n = 0; n < 64; ++n) s += x[n] * std::polar(1.0, -2 * M_PI * k * n / 64.0);
    CHECK(std::abs(a[k] - s) < 1e-12);
  }
  std::vector<std::complex<double>> bad(12);
  CHECK_THROWS(features::Fft(bad));
}

TEST_CASE("stft framing and power") {
  const std::vector<double> zeros(110250, 0.0);
  const auto p0 = features::StftPower(zeros);
  CHECK(p0.rows == 216);
  CHECK(p0.cols == 1025);
  for (double v : p0.data) CHECK(v == 0.0);

  CHECK(features::StftPower(std::vector<double>(1000, 1.0)).rows == 1 + 1000 / 512);
  CHECK_THROWS_AS(features::StftPower(std::vector<double>{}), features::FeatureError);

  std::vector<double> sine(110250);
  for (std::size_t n = 0; n < sine.size(); ++n) sine[n] = std::sin(2 * M_PI * 1000.0 * n / 22050.0);
  const auto ps = features::StftPower(sine);
  for (int t = 2; t < ps.rows - 2; ++t) {
    int best = 0;
    for (int k = 1; k < ps.cols; ++k) if (ps.at(t, k) > ps.at(t, best)) best = k;
    CHECK(best == 93);
  }

  // One interior frame by direct summation with an explicitly built window.
  const auto x = Noise(8000, 2);
  const auto p = features::StftPower(x);
  const int t = 5;
  for (int k : {0, 1, 93, 511, 1024}) {
    std::complex<double> s = 0;
    for (int n = 0; n < 2048; ++n) {
      const double w = std::pow(std::sin(M_PI * n / 2048.0), 2);
      s += x[t * 512 - 1024 + n] * w * std::polar(1.0, -2 * M_PI * k * n / 2048.0);
    }
    CHECK(p.at(t, k) == doctest::Approx(std::norm(s)).epsilon(1e-9));
  }
  // Frame 0 sees the reflected start: x[1024], ..., x[1], x[0], x[1], ...
  std::vector<double> reflected(2048);
  for (int n = 0; n < 2048; ++n) reflected[n] = x[std::abs(n - 1024)];
  std::complex<double> dc = 0;
  for (int n = 0; n < 2048; ++n) dc += reflected[n] * std::pow(std::sin(M_PI * n / 2048.0), 2);
  CHECK(p.at(0, 0) == doctest::Approx(std::norm(dc)).epsilon(1e-9));
}

TEST_CASE("mel filterbank") {
  const Matrix fb = features::MelFilterbank();
  REQUIRE(fb.rows == 128);
  REQUIRE(fb.cols == 1025);
  for (int m = 0; m < fb.rows; ++m) {
    double s = 0;
    for (int k = 0; k < fb.cols; ++k) {
      CHECK(fb.at(m, k) >= 0.0);
      s += fb.at(m, k);
    }
    CHECK(s > 0);
  }
  for (int k = 1; k < 1024; ++k) {
    double s = 0;
    for (int m = 0; m < fb.rows; ++m) s += fb.at(m, k);
    CHECK(s > 0);
  }
  const Matrix one = features::MelFilterbank(1);
  for (int k = 1; k < 1024; ++k) CHECK(one.at(0, k) > 0);

  CHECK(features::HzToMel(1000) == doctest::Approx(15.0));
  CHECK(features::MelToHz(features::HzToMel(4321.0)) == doctest::Approx(4321.0));

  // Flat spectrum against triangles built from the closed-form edges:
  // hz(mel) = 1000 * 6.4^((mel - 15) / 27) above 1 kHz.
  const double top = 15 + 27 * std::log(11025.0 / 1000) / std::log(6.4);
  auto edge = [&](int i) {
    const double mel = top * i / 129.0;
    return mel < 15 ? mel * 200.0 / 3.0 : 1000.0 * std::pow(6.4, (mel - 15) / 27.0);
  };
  const double bin_hz = 11025.0 / 1024;
  for (int m = 0; m < 128; ++m) {
    const double lo = edge(m), mid = edge(m + 1), hi = edge(m + 2);
    double oracle = 0, got = 0;
    for (int k = 0; k < 1025; ++k) {
      const double f = k * bin_hz;
      double tri = 0;
      if (f > lo && f <= mid) tri = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) tri = (hi - f) / (hi - mid);
      oracle += tri * 2 / (hi - lo);
      got += fb.at(m, k);
    }
    CHECK(got == doctest::Approx(oracle).epsilon(1e-9));
    // Area normalization: wide filters integrate to ~1 per Hz.
    if (hi - lo > 40 * bin_hz) CHECK(got * bin_hz == doctest::Approx(1.0).epsilon(0.02));
  }

  CHECK_THROWS_AS(features::MelFilterbank(128, 500, 400), features::FeatureError);
  CHECK_THROWS_AS(features::MelFilterbank(128, 0, 12000), features::FeatureError);
  CHECK_THROWS_AS(features::MelFilterbank(0), features::FeatureError);
}

TEST_CASE("dct2 ortho") {
  const std::vector<double> flat(16, 2.5);
  const auto c = features::Dct2Ortho(flat);
  CHECK(c[0] == doctest::Approx(2.5 * 4));
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-12);

  for (std::size_t n : {1, 2, 3, 7, 8, 13, 64, 128, 100}) {
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto v = Noise(n, seed + 10 * n, 50.0);
      const auto fast = features::Dct2Ortho(v);
      const auto slow = DirectDct(v);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
      CHECK(std::abs(Norm(fast) - Norm(v)) < 1e-9);
    }
  }
}

TEST_CASE("mfcc shape and silence") {
  const std::vector<double> zeros(110250, 0.0);
  const auto m = features::Mfcc(zeros, "z");
  REQUIRE(m.coeffs.rows == 13);
  REQUIRE(m.coeffs.cols == 216);
  // Every log-mel value sits at the floor, -100 dB, so only the DC term is
  // non-zero: -100 * 128 / sqrt(128).
  for (int t = 0; t < 216; ++t) {
    CHECK(m.coeffs.at(0, t) == doctest::Approx(-100.0 * std::sqrt(128.0)).epsilon(1e-12));
    for (int c = 1; c < 13; ++c) CHECK(std::abs(m.coeffs.at(c, t)) < 1e-9);
  }
}

TEST_CASE("mfcc matches an oracle pipeline with the direct dct") {
  const auto x = Noise(110250, 7);
  const auto got = features::Mfcc(x);
  const auto power = features::StftPower(x);
  const auto fb = features::MelFilterbank();
  for (int t : {0, 1, 100, 215}) {
    std::vector<double> log_mel(128);
    for (int m = 0; m < 128; ++m) {
      double e = 0;
      for (int k = 0; k < 1025; ++k) e += fb.at(m, k) * power.at(t, k);
      log_mel[m] = 10 * std::log10(std::max(e, 1e-10));
    }
    const auto c = DirectDct(log_mel);
    for (int i = 0; i < 13; ++i) CHECK(got.coeffs.at(i, t) == doctest::Approx(c[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("gain changes only coefficient 0") {
  const auto x = Noise(110250, 8);
  const auto base = features::Mfcc(x);
  for (double gain : {0.01, 0.5, 3.0}) {
    std::vector<double> y(x);
    for (double& v : y) v *= gain;
    const auto scaled = features::Mfcc(y);
    double worst = 0;
    for (int c = 1; c < 13; ++c)
      for (int t = 0; t < 216; ++t) worst = std::max(worst, std::abs(scaled.coeffs.at(c, t) - base.coeffs.at(c, t)));
    CHECK(worst < 1e-6);
    CHECK(scaled.coeffs.at(0, 50) - base.coeffs.at(0, 50) ==
          doctest::Approx(20 * std::log10(gain) * std::sqrt(128.0)).epsilon(1e-9));
  }
}

TEST_CASE("a 512-sample shift moves interior columns by one") {
  const auto s = Noise(110250 + 512, 9);
  const std::vector<double> a(s.begin(), s.begin() + 110250);
  const std::vector<double> b(s.begin() + 512, s.end());
  const auto fa = features::Mfcc(a);
  const auto fb = features::Mfcc(b);
  // Frame t covers [512t - 1024, 512t + 1024); it is free of padding for
  // 2 <= t <= 213.
  for (int t = 2; t + 1 <= 213; ++t)
    for (int c = 0; c < 13; ++c) CHECK(fb.coeffs.at(c, t) == doctest::Approx(fa.coeffs.at(c, t + 1)).epsilon(1e-9).scale(1.0));
}

TEST_CASE("white noise has a flatter average cepstrum than coloured noise") {
  // A flat spectrum gives a nearly constant log-mel vector, which the DCT
  // maps onto the DC term; spectral tilt shows up in coefficients 1-12.
  auto shape_energy = [](const std::vector<double>& x) {
    const auto m = features::Mfcc(x);
    double e = 0;
    for (int c = 1; c < 13; ++c) {
      double mean = 0;
      for (int t = 0; t < 216; ++t) mean += m.coeffs.at(c, t) / 216;
      e += mean * mean;
    }
    return e;
  };
  const auto white = Noise(110250, 12);
  std::vector<double> brown(white.size());
  double acc = 0;
  for (std::size_t i = 0; i < white.size(); ++i) brown[i] = acc = 0.99 * acc + white[i];
  const double flat = shape_energy(white), tilted = shape_energy(brown);
  CHECK(flat < 0.05 * tilted);
}

TEST_CASE("feature cache round trip") {
  std::vector<features::FeatureMatrix> items;
  items.push_back(features::Mfcc(Noise(110250, 1), "a.wav#0"));
  items.push_back(features::Mfcc(std::vector<double>(110250, 0.0), "b.wav#3"));
  const auto path = std::filesystem::temp_directory_path() / "skylisten_features.cache";
  features::WriteFeatureCache(path, items);
  CHECK(std::filesystem::file_size(path) == 8 + 4 + 8 + 2 * (4 + 7 + 13 * 216 * 8));
  const auto back = features::ReadFeatureCache(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].source == "a.wav#0");
  CHECK(back[0].coeffs.data == items[0].coeffs.data);
  CHECK(back[1].coeffs.data == items[1].coeffs.data);

  std::vector<features::FeatureMatrix> wrong = {features::Mfcc(std::vector<double>(5000, 0.1), "short")};
  CHECK_THROWS_AS(features::WriteFeatureCache(path, wrong), features::FeatureError);
}
