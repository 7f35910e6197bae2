#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "doctest.h"
#include "skylisten/models/logreg.h"
#include "skylisten/models/model.h"
#include "skylisten/models/network.h"

using namespace skylisten;
using namespace skylisten::models;

namespace {

Tensor RandomTensor(std::vector<int> shape, std::uint64_t seed, double amp = 1.0) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  for (double& v : t.data) v = u(rng);
  return t;
}

// Non-zero biases so that bias gradients and the L2 convention are exercised.
void JitterParams(Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (Param* p : net.params()) {
    for (double& v : p->value) v += u(rng);
  }
}

// Step-wise AP over distinct thresholds, written independently of the eval module.
double BruteAp(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> th(s);
  std::sort(th.rbegin(), th.rend());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  const double pos = std::count(y.begin(), y.end(), 1);
  double ap = 0, prev_r = 0;
  for (double t : th) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] ? tp : fp) += 1;
    }
    const double r = tp / pos;
    ap += (r - prev_r) * tp / (tp + fp);
    prev_r = r;
  }
  return ap;
}

double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Class 1 adds a bump on coefficients 1-3; both classes carry noise.
FeatureSet ToyFeatures(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  FeatureSet set;
  for (int i = 0; i < n; ++i) {
    features::FeatureMatrix m;
    m.source = "toy" + std::to_string(i);
    m.coeffs.rows = 13;
    m.coeffs.cols = 216;
    m.coeffs.data.resize(2808);
    const int label = i % 3 == 0 ? 1 : 0;
    for (int r = 0; r < 13; ++r) {
      for (int c = 0; c < 216; ++c) {
        double v = noise(rng);
        if (label && r >= 1 && r <= 3) v += 1.5;
        m.coeffs.data[r * 216 + c] = v;
      }
    }
    set.Add(m, label);
  }
  return set;
}

}  // namespace

TEST_CASE("cnn shape walk") {
  auto cnn = BuildCnn(1);
  const std::vector<std::vector<int>> expected = {
      {13, 216, 1}, {11, 214, 32}, {11, 214, 32}, {6, 107, 32}, {6, 107, 32},
      {4, 105, 32}, {4, 105, 32}, {2, 53, 32},   {2, 53, 32},  {1, 52, 32},
      {1, 52, 32},  {1, 26, 32},  {1, 26, 32},   {832},        {32},
      {32},         {32},         {1},           {1}};
  CHECK(cnn->shape_walk() == expected);

  auto mlp = BuildMlp(1);
  CHECK(mlp->shape_walk()[1] == std::vector<int>{2808});
  CHECK(mlp->shape_walk()[2] == std::vector<int>{128});
  CHECK(mlp->output_shape() == std::vector<int>{1});
  CHECK(mlp->parameter_count() == 2808 * 128 + 128 + 128 * 32 + 32 + 33);
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(0);
  Network net({5});
  CHECK_THROWS_AS(net.Add(std::make_unique<Dense>(4, 2, 0.0, rng)), ModelError);
  Network img({3, 3, 1});
  CHECK_THROWS_AS(img.Add(std::make_unique<Conv2D>(1, 2, 4, 4, 0.0, rng)), ModelError);
  auto cnn = BuildCnn(0);
  CHECK_THROWS_AS(cnn->Predict(Tensor({1, 13, 215, 1})), ModelError);
}

TEST_CASE("zero input through an untrained head gives one half") {
  for (auto* build : {&BuildMlp, &BuildCnn}) {
    auto net = (*build)(7);
    std::vector<int> shape = {2};
    shape.insert(shape.end(), net->input_shape().begin(), net->input_shape().end());
    const auto p = net->Predict(Tensor(shape));
    REQUIRE(p.size() == 2);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
  }
}

TEST_CASE("inference is deterministic and in (0,1)") {
  auto net = BuildCnn(3);
  const Tensor x = RandomTensor({3, 13, 216, 1}, 4, 20.0);
  const auto a = net->Predict(x);
  const auto b = net->Predict(x);
  CHECK(a == b);
  for (double p : a) CHECK((p > 0.0 && p < 1.0));
}

TEST_CASE("balanced class weights") {
  const std::vector<int> even = {0, 1, 0, 1};
  const auto w = BalancedClassWeights(even);
  CHECK(w.negative == 1.0);
  CHECK(w.positive == 1.0);

  std::vector<int> skew(100, 0);
  std::fill(skew.begin(), skew.begin() + 25, 1);
  const auto s = BalancedClassWeights(skew);
  CHECK(s.negative == doctest::Approx(0.6667).epsilon(1e-3));
  CHECK(s.positive == 2.0);

  const std::vector<int> one = {1, 1};
  CHECK_THROWS_AS(BalancedClassWeights(one), ModelError);
}

TEST_CASE("unit class weights equal the unweighted loss") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(17);
    std::vector<int> y(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = u(rng);
      y[i] = u(rng) < 0.4;
    }
    double plain = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double q = std::clamp(p[i], kProbabilityClip, 1.0 - kProbabilityClip);
      plain += -(y[i] * std::log(q) + (1 - y[i]) * std::log(1 - q));
    }
    plain /= p.size();
    CHECK(WeightedBce(p, y, ClassWeights{1.0, 1.0}) == plain);
  }
  const std::vector<double> p = {0.9, 0.2};
  const std::vector<int> y = {1, 0};
  const double base = WeightedBce(p, y, {1.0, 1.0});
  CHECK(WeightedBce(p, y, {2.0, 2.0}) == doctest::Approx(2 * base).epsilon(1e-14));
}

TEST_CASE("l2 changes weight gradients only") {
  auto build = [](double l2) {
    Rng rng(11);
    auto net = std::make_unique<Network>(std::vector<int>{4});
    net->Add(std::make_unique<Dense>(4, 3, l2, rng));
    net->Add(std::make_unique<ReLU>());
    net->Add(std::make_unique<Dense>(3, 1, l2, rng));
    net->Add(std::make_unique<Sigmoid>());
    JitterParams(*net, 12);
    return net;
  };
  auto plain = build(0.0);
  auto reg = build(0.05);
  const Tensor x = RandomTensor({5, 4}, 13);
  const std::vector<int> y = {0, 1, 1, 0, 1};
  Rng r1(0), r2(0);
  const double l0 = LossAndGradient(*plain, x, y, {1, 1}, false, r1);
  const double l1 = LossAndGradient(*reg, x, y, {1, 1}, false, r2);
  CHECK(l1 - l0 == doctest::Approx(reg->L2Penalty()).epsilon(1e-12));

  const auto pa = plain->params();
  const auto pb = reg->params();
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const bool is_bias = pa[k]->shape.size() == 1;
    for (std::size_t i = 0; i < pa[k]->grad.size(); ++i) {
      if (is_bias) {
        CHECK(pb[k]->grad[i] == pa[k]->grad[i]);
      } else {
        CHECK(pb[k]->grad[i] - pa[k]->grad[i] == doctest::Approx(2 * 0.05 * pa[k]->value[i]).epsilon(1e-9));
      }
    }
  }
}

namespace {

struct GradCase {
  const char* name;
  std::vector<int> input;
  bool training;
  std::function<void(Network&, Rng&)> build;
};

void RunGradCase(const GradCase& c) {
  double worst = 0;
  std::string worst_label;
  std::size_t checked = 0;
  for (std::uint64_t point = 0; point < 100; ++point) {
    Rng rng(point);
    Network net(c.input);
    c.build(net, rng);
    JitterParams(net, point + 1000);
    std::vector<int> shape = {3};
    shape.insert(shape.end(), c.input.begin(), c.input.end());
    const Tensor x = RandomTensor(shape, point + 2000);
    const std::vector<int> y = {1, 0, static_cast<int>(point % 2)};
    const auto report = GradCheck(net, x, y, {0.8, 1.7}, true, c.training, point);
    if (report.max_rel_error > worst) {
      worst = report.max_rel_error;
      worst_label = report.worst + " at point " + std::to_string(point);
    }
    checked += report.checked;
  }
  INFO(std::string(c.name) << " worst " << worst_label);
  CHECK(checked > 0);
  CHECK(worst < 1e-4);
}

}  // namespace

TEST_CASE("gradient check per layer type at 100 random points") {
  const std::vector<GradCase> cases = {
      {"dense+sigmoid", {4}, false,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Dense>(4, 3, 0.01, r));
         n.Add(std::make_unique<Sigmoid>());
         n.Add(std::make_unique<Dense>(3, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"relu", {4}, false,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Dense>(4, 5, 0.0, r));
         n.Add(std::make_unique<ReLU>());
         n.Add(std::make_unique<Dense>(5, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"conv2d+flatten", {5, 6, 2}, false,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Conv2D>(2, 3, 2, 3, 0.01, r));
         n.Add(std::make_unique<Flatten>());
         n.Add(std::make_unique<Dense>(4 * 4 * 3, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"maxpool 3x3", {7, 8, 1}, false,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Conv2D>(1, 2, 2, 2, 0.0, r));
         n.Add(std::make_unique<MaxPool2D>(3, 3, 2));
         n.Add(std::make_unique<Flatten>());
         n.Add(std::make_unique<Dense>(3 * 4 * 2, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"maxpool 2x2", {5, 5, 2}, false,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<MaxPool2D>(2, 2, 2));
         n.Add(std::make_unique<Flatten>());
         n.Add(std::make_unique<Dense>(3 * 3 * 2, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"dropout (training)", {4}, true,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Dense>(4, 6, 0.0, r));
         n.Add(std::make_unique<Dropout>(0.4));
         n.Add(std::make_unique<Dense>(6, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
      {"conv block", {6, 9, 1}, true,
       [](Network& n, Rng& r) {
         n.Add(std::make_unique<Conv2D>(1, 2, 3, 3, 0.0, r));
         n.Add(std::make_unique<ReLU>());
         n.Add(std::make_unique<MaxPool2D>(3, 3, 2));
         n.Add(std::make_unique<Dropout>(0.4));
         n.Add(std::make_unique<Flatten>());
         n.Add(std::make_unique<Dense>(2 * 4 * 2, 2, 0.0, r));
         n.Add(std::make_unique<ReLU>());
         n.Add(std::make_unique<Dense>(2, 1, 0.0, r));
         n.Add(std::make_unique<Sigmoid>());
       }},
  };
  for (const auto& c : cases) RunGradCase(c);
}

TEST_CASE("dropout is inverted and inactive at inference") {
  Dropout d(0.4);
  Rng rng(1);
  Tensor x({1, 10000});
  std::fill(x.data.begin(), x.data.end(), 1.0);
  const Tensor inf = d.Forward(x, false, rng);
  CHECK(inf.data == x.data);
  const Tensor tr = d.Forward(x, true, rng);
  double sum = 0;
  int dropped = 0;
  for (double v : tr.data) {
    sum += v;
    if (v == 0.0) ++dropped;
    else CHECK(v == doctest::Approx(1.0 / 0.6));
  }
  CHECK(dropped / 10000.0 == doctest::Approx(0.4).epsilon(0.05));
  CHECK(sum / 10000.0 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("maxpool same padding windows") {
  MaxPool2D pool(3, 3, 2);
  Tensor x({1, 4, 4, 1});
  for (int i = 0; i < 16; ++i) x.data[i] = i;
  Rng rng(0);
  const Tensor y = pool.Forward(x, false, rng);
  // total padding 1 per axis, none before: windows start at rows/cols 0 and 2.
  CHECK(y.shape == std::vector<int>{1, 2, 2, 1});
  CHECK(y.data == std::vector<double>{10, 11, 14, 15});
  MaxPool2D odd(3, 3, 2);
  Tensor z({1, 5, 5, 1});
  for (int i = 0; i < 25; ++i) z.data[i] = -i;
  // total padding 2 per axis, one before: the first window covers row/col 0 only with the pad.
  const Tensor w = odd.Forward(z, false, rng);
  CHECK(w.shape == std::vector<int>{1, 3, 3, 1});
  CHECK(w.data[0] == 0.0);
  CHECK(w.data[4] == -6.0);
}

TEST_CASE("logreg on a separable toy lifted to 2808 dims") {
  std::vector<double> x;
  std::vector<int> y;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 40; ++i) {
    const double a = u(rng), b = u(rng);
    const int label = a + 0.5 * b > 0.2 ? 1 : 0;
    std::vector<double> row(2808, 0.0);
    row[0] = a + (label ? 0.3 : -0.3);
    row[1] = b;
    x.insert(x.end(), row.begin(), row.end());
    y.push_back(label);
  }
  const auto fit = FitLogReg(x, 2808, y);
  CHECK(fit.grad_norm < 1e-6);
  std::vector<double> g;
  LogRegObjective(fit.model, x, 2808, y, 1.0, &g);
  double norm = 0;
  for (double v : g) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-6);
  for (std::size_t j = 2; j < 2808; ++j) CHECK(fit.model.coef[j] == 0.0);
  CHECK(BruteAp(LogRegPredict(fit.model, x, 2808), y) == 1.0);
}

TEST_CASE("logreg matches a full-batch gradient descent oracle") {
  const int n = 50;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < n; ++i) {
    const double a = g(rng), b = g(rng);
    const int label = a - b + 0.8 * g(rng) > 0 ? 1 : 0;
    pts.push_back({a, b});
    std::vector<double> row(2808, 0.0);
    row[0] = a;
    row[1] = b;
    x.insert(x.end(), row.begin(), row.end());
    y.push_back(label);
  }
  // Gradient descent on (w0, w1, b) with step 1/L, L bounding the Hessian.
  double w0 = 0, w1 = 0, b = 0, lip = 1;
  for (auto& p : pts) lip += 0.25 * (p[0] * p[0] + p[1] * p[1] + 1);
  auto objective = [&](double a0, double a1, double bb) {
    double f = 0.5 * (a0 * a0 + a1 * a1);
    for (int i = 0; i < n; ++i) {
      const double z = a0 * pts[i][0] + a1 * pts[i][1] + bb;
      f += Softplus(y[i] ? -z : z);
    }
    return f;
  };
  for (int it = 0; it < 200000; ++it) {
    double g0 = w0, g1 = w1, gb = 0;
    for (int i = 0; i < n; ++i) {
      const double z = w0 * pts[i][0] + w1 * pts[i][1] + b;
      const double r = 1.0 / (1.0 + std::exp(-z)) - y[i];
      g0 += r * pts[i][0];
      g1 += r * pts[i][1];
      gb += r;
    }
    if (std::sqrt(g0 * g0 + g1 * g1 + gb * gb) < 1e-10) break;
    w0 -= g0 / lip;
    w1 -= g1 / lip;
    b -= gb / lip;
  }
  const auto fit = FitLogReg(x, 2808, y);
  CHECK(std::abs(fit.objective - objective(w0, w1, b)) < 1e-6);
  CHECK(fit.model.coef[0] == doctest::Approx(w0).epsilon(1e-5));
  CHECK(fit.model.coef[1] == doctest::Approx(w1).epsilon(1e-5));
  CHECK(fit.model.intercept == doctest::Approx(b).epsilon(1e-5));
}

TEST_CASE("logreg errors") {
  const std::vector<double> x(2 * 2808, 1.0);
  const std::vector<int> same = {1, 1};
  CHECK_THROWS_AS(FitLogReg(x, 2808, same), ModelError);
  std::vector<double> bad(x);
  bad[5] = NAN;
  const std::vector<int> y = {0, 1};
  CHECK_THROWS_AS(FitLogReg(bad, 2808, y), ModelError);
}

TEST_CASE("training is bitwise reproducible") {
  const FeatureSet data = ToyFeatures(30, 1);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.seed = 42;
  auto a = TrainedModel::Fit(ModelKind::kMlp, data, cfg);
  auto b = TrainedModel::Fit(ModelKind::kMlp, data, cfg);
  CHECK(a.history() == b.history());
  CHECK(a.history().size() == 2);
  const auto pa = a.network()->params();
  const auto pb = b.network()->params();
  for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k]->value == pb[k]->value);
  cfg.seed = 43;
  auto c = TrainedModel::Fit(ModelKind::kMlp, data, cfg);
  CHECK(c.network()->params()[0]->value != pa[0]->value);
}

TEST_CASE("mlp reaches held-out AP 0.99 on toy features after 50 epochs") {
  const FeatureSet train = ToyFeatures(120, 2);
  const FeatureSet test = ToyFeatures(60, 3);
  TrainConfig cfg;
  cfg.seed = 5;
  auto model = TrainedModel::Fit(ModelKind::kMlp, train, cfg);
  CHECK(model.history().size() == 50);
  for (double h : model.history()) CHECK(std::isfinite(h));
  CHECK(model.history().back() < model.history().front());
  CHECK(BruteAp(model.Predict(test), test.y) >= 0.99);
  auto lr = TrainedModel::Fit(ModelKind::kLogReg, train, cfg);
  CHECK(BruteAp(lr.Predict(test), test.y) == 1.0);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "skylisten_models_test";
  std::filesystem::create_directories(dir);
  const FeatureSet data = ToyFeatures(12, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 8;
  for (ModelKind kind : {ModelKind::kLogReg, ModelKind::kMlp, ModelKind::kCnn}) {
    auto model = TrainedModel::Fit(kind, data, cfg);
    const auto path = dir / (std::string(ToString(kind)) + ".bin");
    model.Save(path);
    auto loaded = TrainedModel::Load(path);
    CHECK(loaded.kind() == kind);
    CHECK(loaded.seed() == 8);
    CHECK(loaded.history() == model.history());
    CHECK(loaded.Predict(data) == model.Predict(data));
    CHECK(ParseModelKind(ToString(kind)) == kind);
  }
  {
    std::ofstream junk(dir / "junk.bin", std::ios::binary);
    junk << "SKYMODEL";
  }
  CHECK_THROWS_AS(TrainedModel::Load(dir / "junk.bin"), ModelError);
  CHECK_THROWS_AS(ParseModelKind("rnn"), ModelError);
  std::filesystem::remove_all(dir);
}
