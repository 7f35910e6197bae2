#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "skylisten/eval/metrics.h"
#include "skylisten/eval/protocol.h"

using namespace skylisten;
using namespace skylisten::eval;
using dataset::Label;

namespace {

// Sweeps every distinct score as a threshold and counts directly.
double BruteAp(const std::vector<double>& s, const std::vector<int>& y) {
  std::set<double, std::greater<>> th(s.begin(), s.end());
  const double pos = std::count(y.begin(), y.end(), 1);
  double ap = 0, prev = 0;
  for (double t : th) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] ? tp : fp) += 1;
    }
    ap += (tp / pos - prev) * (tp / (tp + fp));
    prev = tp / pos;
  }
  return ap;
}

models::FeatureSet ConstantFold(int pos, int neg) {
  models::FeatureSet f;
  for (int i = 0; i < pos + neg; ++i) {
    f.y.push_back(i < pos ? 1 : 0);
    f.ids.push_back(std::to_string(i));
    f.x.resize(f.x.size() + models::kFeatureSize, 0.0);
  }
  return f;
}

}  // namespace

TEST_CASE("average precision basics") {
  CHECK(AveragePrecision(std::vector<double>{0.9, 0.8, 0.1, 0.2}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(AveragePrecision(std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 0, 1, 0}) ==
        doctest::Approx(0.4));
  // 1 0 1 ranking: P@1 = 1, P@3 = 2/3.
  CHECK(AveragePrecision(std::vector<double>{3, 2, 1}, std::vector<int>{1, 0, 1}) ==
        doctest::Approx(0.5 * 1.0 + 0.5 * 2.0 / 3.0));
  CHECK_THROWS_AS(AveragePrecision(std::vector<double>{1, 2}, std::vector<int>{0, 0}), EvalError);
  CHECK_THROWS_AS(AveragePrecision(std::vector<double>{1, 2}, std::vector<int>{1}), EvalError);
  CHECK_THROWS_AS(AveragePrecision(std::vector<double>{NAN, 2}, std::vector<int>{1, 0}), EvalError);
}

TEST_CASE("average precision equals the brute-force sweep on every small configuration") {
  std::size_t configs = 0;
  for (int n = 1; n <= 8; ++n) {
    const int levels = n <= 6 ? 4 : 3;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= levels;
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> y(n);
      for (int i = 0; i < n; ++i) y[i] = (mask >> i) & 1;
      for (long code = 0; code < total; ++code) {
        std::vector<double> s(n);
        long c = code;
        for (int i = 0; i < n; ++i, c /= levels) s[i] = static_cast<double>(c % levels) / (levels - 1);
        const double got = AveragePrecision(s, y);
        if (got != BruteAp(s, y)) {
          FAIL("mismatch at n=" << n << " mask=" << mask << " code=" << code);
        }
        ++configs;
      }
    }
  }
  CHECK(configs > 1000000);
}

TEST_CASE("ap is a rank statistic") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(30), t(30);
    std::vector<int> y(30);
    for (int i = 0; i < 30; ++i) {
      s[i] = std::round(u(rng) * 4) / 4;
      t[i] = std::exp(2 * s[i]) + 7;
      y[i] = u(rng) > 0.5;
    }
    y[0] = 1;
    CHECK(AveragePrecision(s, y) == AveragePrecision(t, y));
  }
}

TEST_CASE("ap of labels and of inverted labels") {
  std::vector<int> y;
  std::vector<double> truth, inverted;
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2);
    truth.push_back(i % 2);
    // Every negative outranks every positive, no ties.
    inverted.push_back((1 - i % 2) * 100.0 + i);
  }
  CHECK(AveragePrecision(truth, y) == 1.0);
  CHECK(AveragePrecision(inverted, y) < 0.5);
  // Binary inverted scores form two tied groups, which is exactly prevalence.
  std::vector<double> binary;
  for (int v : y) binary.push_back(1 - v);
  CHECK(AveragePrecision(binary, y) == 0.5);
}

TEST_CASE("pr curve ordering") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 9);
  std::vector<double> s(100);
  std::vector<int> y(100);
  for (int i = 0; i < 100; ++i) {
    s[i] = u(rng);
    y[i] = u(rng) < 4;
  }
  const auto curve = PrecisionRecall(s, y);
  CHECK(curve.points.size() == std::set<double>(s.begin(), s.end()).size());
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].threshold < curve.points[i - 1].threshold);
    CHECK(curve.points[i].recall >= curve.points[i - 1].recall);
  }
  CHECK(curve.points.back().recall == 1.0);
  double ap = 0, prev = 0;
  for (const auto& p : curve.points) {
    ap += (p.recall - prev) * p.precision;
    prev = p.recall;
  }
  CHECK(ap == curve.average_precision);
}

TEST_CASE("population standard deviation") {
  const auto s = Summarize(std::vector<double>{1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("cross validation with a constant model gives fold prevalence") {
  std::vector<models::FeatureSet> folds = {ConstantFold(1, 3), ConstantFold(2, 2), ConstantFold(1, 4),
                                           ConstantFold(3, 1), ConstantFold(1, 9)};
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> train_sizes;
  const auto report = CrossValidate(
      folds,
      [&](const models::FeatureSet& train, const models::FeatureSet& held, std::uint64_t seed) {
        seeds.push_back(seed);
        train_sizes.push_back(train.size());
        return std::vector<double>(held.size(), 0.3);
      },
      100, "dummy");
  CHECK(seeds == std::vector<std::uint64_t>{101, 102, 103, 104, 105});
  CHECK(train_sizes == std::vector<std::size_t>{23, 23, 22, 23, 17});
  const std::vector<double> prevalence = {0.25, 0.5, 0.2, 0.75, 0.1};
  for (int k = 0; k < 5; ++k) CHECK(report.fold_ap[k] == doctest::Approx(prevalence[k]));
  CHECK(report.mean == doctest::Approx(Summarize(report.fold_ap).mean));

  std::vector<models::FeatureSet> same(5, ConstantFold(2, 3));
  const auto flat = CrossValidate(
      same, [](const auto&, const auto& held, std::uint64_t) { return std::vector<double>(held.size(), 1.0); }, 0,
      "dummy");
  CHECK(flat.std == 0.0);
  CHECK_THROWS_AS(CrossValidate(std::vector<models::FeatureSet>(4, ConstantFold(1, 1)),
                                [](const auto&, const auto& h, std::uint64_t) { return std::vector<double>(h.size()); },
                                0, "x"),
                  EvalError);
}

TEST_CASE("pooled ap differs from the mean of per-hour aps") {
  // Each hour ranks perfectly on its own, but hour b's aircraft bins score
  // below hour a's silence bins, and the hours differ in prevalence.
  const std::vector<std::string> hours = {"a", "b"};
  const std::vector<std::vector<Label>> labels = {
      {Label::kAircraft, Label::kAircraft, Label::kAircraft, Label::kSilence, Label::kIgnore},
      {Label::kAircraft, Label::kSilence, Label::kSilence, Label::kSilence, Label::kSilence, Label::kSilence}};
  const std::vector<std::vector<std::vector<double>>> scores = {
      {{0.9, 0.8, 0.95, 0.7, 0.0}, {0.6, 0.1, 0.2, 0.3, 0.4, 0.5}}};
  const auto r = EvaluateEnvScores({"m"}, hours, labels, scores);
  REQUIRE(r.ap[0][0].has_value());
  CHECK(*r.ap[0][0] == 1.0);
  CHECK(*r.ap[0][1] == 1.0);
  CHECK(*r.model_mean[0] == 1.0);
  const std::vector<double> pooled_s = {0.9, 0.8, 0.95, 0.7, 0.6, 0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<int> pooled_y = {1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
  CHECK(r.pooled[0] == BruteAp(pooled_s, pooled_y));
  CHECK(r.pooled[0] < 1.0);
  CHECK(r.pooled[0] != *r.model_mean[0]);
}

TEST_CASE("environment report structure") {
  const std::vector<std::string> hours = {"h1", "h2", "h3"};
  std::vector<std::vector<Label>> labels(3);
  std::mt19937_64 rng(8);
  for (int h = 0; h < 3; ++h) {
    for (int i = 0; i < 720; ++i) {
      Label l = Label::kSilence;
      if (h != 1 && i % 50 < 6) l = Label::kAircraft;
      if (h != 1 && (i % 50 == 6 || i % 50 == 49)) l = Label::kIgnore;
      labels[h].push_back(l);
    }
  }
  std::vector<std::vector<std::vector<double>>> scores(2, std::vector<std::vector<double>>(3));
  std::uniform_real_distribution<double> u(0, 1);
  for (int h = 0; h < 3; ++h) {
    for (Label l : labels[h]) {
      // Model 1 is the ground truth except on ignore bins, which it gets wrong.
      scores[0][h].push_back(l == Label::kAircraft ? 1.0 : l == Label::kIgnore ? 2.0 : 0.0);
      scores[1][h].push_back(u(rng));
    }
  }
  const auto r = EvaluateEnvScores({"truth", "noise"}, hours, labels, scores);
  CHECK(r.skipped_hours == std::vector<std::string>{"h2"});
  CHECK(*r.ap[0][0] == 1.0);
  CHECK(*r.ap[0][2] == 1.0);
  CHECK_FALSE(r.ap[0][1].has_value());
  CHECK(r.pooled[0] == 1.0);
  CHECK(*r.model_mean[1] == doctest::Approx((*r.ap[1][0] + *r.ap[1][2]) / 2));
  CHECK(*r.hour_mean[0] == doctest::Approx((*r.ap[0][0] + *r.ap[1][0]) / 2));
  CHECK_FALSE(r.hour_mean[1].has_value());
  CHECK(r.pooled_summary.mean == doctest::Approx((r.pooled[0] + r.pooled[1]) / 2));

  const std::string t5 = FormatTable5(r);
  CHECK(t5.rfind("model,h1,h2,h3,mean\ntruth,100.00,,100.00,100.00\n", 0) == 0);
}

TEST_CASE("probability trace") {
  const auto bins = dataset::QuantizeEnvAnnotations({{100.0, 160.0}}, "hour5");
  REQUIRE(bins.size() == 720);
  std::vector<Label> labels;
  std::vector<double> p;
  for (const auto& b : bins) {
    labels.push_back(b.label);
    p.push_back(b.label == Label::kAircraft ? 0.75 : 0.125);
  }
  const std::string csv = FormatTrace(labels, p);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 721);
  CHECK(csv.find("t_start_s,ground_truth,probability\n0.0,0,0.125000000\n") == 0);
  CHECK(csv.find("\n100.0,1,0.750000000\n") != std::string::npos);
  CHECK(csv.find("\n155.0,1,") != std::string::npos);
  CHECK(csv.find("\n3595.0,0,") != std::string::npos);
  CHECK(csv == FormatTrace(labels, p));
  const auto straddle = dataset::QuantizeEnvAnnotations({{102.0, 158.0}}, "hour5");
  std::vector<Label> l2;
  for (const auto& b : straddle) l2.push_back(b.label);
  CHECK(FormatTrace(l2, p).find("\n100.0,ignore,") != std::string::npos);
}

TEST_CASE("table 3 csv") {
  CvReport cv{"mlp", {0.98, 0.99, 1.0, 0.97, 0.96}, 0.98, 0.0141421356};
  const std::string csv = FormatTable3({{"mlp", cv, 0.9939, MeanStd{0.5, 0.1}}, {"logreg", std::nullopt, 0.9, std::nullopt}});
  CHECK(csv == "model,cv_map,cv_std,test_ap,env_map,env_std\nmlp,98.00,1.41,99.39,50.00,10.00\nlogreg,,,90.00,,\n");
}

TEST_CASE("cross validating logistic regression on separable folds") {
  std::vector<models::FeatureSet> folds(5);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 1);
  for (int k = 0; k < 5; ++k) {
    for (int i = 0; i < 8; ++i) {
      features::FeatureMatrix m;
      m.source = "f" + std::to_string(k) + "_" + std::to_string(i);
      m.coeffs.rows = 13;
      m.coeffs.cols = 216;
      const int label = i < 3;
      for (int j = 0; j < 2808; ++j) m.coeffs.data.push_back(g(rng) + (label && j < 216 ? 2.0 : 0.0));
      folds[k].Add(m, label);
    }
  }
  models::TrainConfig cfg;
  cfg.seed = 10;
  auto run = CrossValidateModel(models::ModelKind::kLogReg, folds, cfg);
  CHECK(run.models.size() == 5);
  CHECK(run.models[2].seed() == 13);
  for (double ap : run.report.fold_ap) CHECK(ap == 1.0);
  CHECK(run.report.std == 0.0);
}
