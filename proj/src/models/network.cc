#include "skylisten/models/network.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace skylisten::models {

ClassWeights BalancedClassWeights(std::span<const int> labels) {
  const auto n = static_cast<double>(labels.size());
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = n - pos;
  if (pos == 0 || neg == 0) throw ModelError(ModelErrc::kSingleClass, "training labels contain a single class");
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

double WeightedBce(std::span<const double> p, std::span<const int> y, ClassWeights w, std::vector<double>* grad) {
  if (p.size() != y.size() || p.empty()) {
    throw ModelError(ModelErrc::kShapeMismatch, "loss needs one label per prediction");
  }
  const double n = static_cast<double>(p.size());
  if (grad) grad->assign(p.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool clipped = p[i] < kProbabilityClip || p[i] > 1.0 - kProbabilityClip;
    const double q = std::clamp(p[i], kProbabilityClip, 1.0 - kProbabilityClip);
    const double wi = y[i] == 1 ? w.positive : w.negative;
    total += wi * (y[i] == 1 ? -std::log(q) : -std::log(1.0 - q));
    if (grad && !clipped) (*grad)[i] = wi * (y[i] == 1 ? -1.0 / q : 1.0 / (1.0 - q)) / n;
  }
  return total / n;
}

Network::Network(std::vector<int> input_shape) { shapes_.push_back(std::move(input_shape)); }

void Network::Add(std::unique_ptr<Layer> layer) {
  shapes_.push_back(layer->OutputShape(shapes_.back()));
  layers_.push_back(std::move(layer));
}

Tensor Network::Forward(const Tensor& x, bool training, Rng& rng) {
  std::vector<int> expect = {x.batch()};
  expect.insert(expect.end(), input_shape().begin(), input_shape().end());
  if (x.shape != expect) {
    throw ModelError(ModelErrc::kShapeMismatch,
                     "network expects N x " + ShapeString(input_shape()) + ", got " + ShapeString(x.shape));
  }
  Tensor h = x;
  for (auto& layer : layers_) h = layer->Forward(h, training, rng);
  return h;
}

Tensor Network::Backward(const Tensor& grad_out) {
  Tensor g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->Backward(g);
  return g;
}

std::vector<Param*> Network::params() {
  std::vector<Param*> out;
  for (auto& layer : layers_) {
    for (Param* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (Param* p : params()) n += p->value.size();
  return n;
}

void Network::ZeroGrad() {
  for (Param* p : params()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

double Network::L2Penalty() {
  double total = 0.0;
  for (Param* p : params()) {
    if (p->l2 == 0.0) continue;
    double s = 0.0;
    for (double v : p->value) s += v * v;
    total += p->l2 * s;
  }
  return total;
}

std::vector<std::uint32_t> Network::Fingerprint() const {
  std::vector<std::uint32_t> out;
  for (const auto& layer : layers_) layer->AppendFingerprint(out);
  return out;
}

std::vector<double> Network::Predict(const Tensor& x) {
  std::vector<double> out;
  out.reserve(x.batch());
  const std::size_t per = x.per_sample();
  Rng unused(0);
  for (int start = 0; start < x.batch(); start += 216) {
    const int n = std::min(216, x.batch() - start);
    Tensor chunk(x.shape);
    chunk.shape[0] = n;
    chunk.data.assign(x.data.begin() + static_cast<std::ptrdiff_t>(start * per),
                      x.data.begin() + static_cast<std::ptrdiff_t>((start + n) * per));
    const Tensor y = Forward(chunk, false, unused);
    out.insert(out.end(), y.data.begin(), y.data.end());
  }
  return out;
}

double LossAndGradient(Network& net, const Tensor& x, std::span<const int> y, ClassWeights w, bool training,
                       Rng& rng, Tensor* input_grad) {
  net.ZeroGrad();
  const Tensor p = net.Forward(x, training, rng);
  if (p.per_sample() != 1) throw ModelError(ModelErrc::kShapeMismatch, "network must end in one unit");
  std::vector<double> dp;
  const double loss = WeightedBce(p.data, y, w, &dp) + net.L2Penalty();
  Tensor g = p;
  g.data = std::move(dp);
  Tensor dx = net.Backward(g);
  for (Param* prm : net.params()) {
    if (prm->l2 == 0.0) continue;
    for (std::size_t i = 0; i < prm->value.size(); ++i) prm->grad[i] += 2.0 * prm->l2 * prm->value[i];
  }
  if (input_grad) *input_grad = std::move(dx);
  return loss;
}

std::vector<double> Train(Network& net, const Tensor& x, std::span<const int> y, const TrainConfig& cfg) {
  const int n = x.batch();
  if (n != static_cast<int>(y.size())) throw ModelError(ModelErrc::kShapeMismatch, "one label per sample");
  if (cfg.epochs <= 0 || cfg.batch_size <= 0 || !(cfg.learning_rate > 0)) {
    throw ModelError(ModelErrc::kBadSpec, "epochs, batch size and learning rate must be positive");
  }
  const ClassWeights w = cfg.balanced_class_weights ? BalancedClassWeights(y) : ClassWeights{};
  Rng rng(cfg.seed);
  const auto params = net.params();
  std::vector<std::vector<double>> m, v;
  for (Param* p : params) {
    m.emplace_back(p->value.size(), 0.0);
    v.emplace_back(p->value.size(), 0.0);
  }
  const std::size_t per = x.per_sample();
  std::vector<int> order(n);
  std::vector<double> history;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);
    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      Tensor xb(x.shape);
      xb.shape[0] = b;
      xb.data.resize(static_cast<std::size_t>(b) * per);
      std::vector<int> yb(b);
      for (int k = 0; k < b; ++k) {
        const int src = order[start + k];
        std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>(src * per), per,
                    xb.data.begin() + static_cast<std::ptrdiff_t>(k * per));
        yb[k] = y[src];
      }
      const double loss = LossAndGradient(net, xb, yb, w, true, rng);
      if (!std::isfinite(loss)) {
        throw ModelError(ModelErrc::kNonFinite, "training loss diverged in epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * b;
      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < params.size(); ++k) {
        Param& p = *params[k];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
          const double g = p.grad[i];
          m[k][i] = cfg.beta1 * m[k][i] + (1.0 - cfg.beta1) * g;
          v[k][i] = cfg.beta2 * v[k][i] + (1.0 - cfg.beta2) * g * g;
          p.value[i] -= cfg.learning_rate * (m[k][i] / c1) / (std::sqrt(v[k][i] / c2) + cfg.epsilon);
        }
      }
    }
    history.push_back(epoch_loss / n);
  }
  return history;
}

namespace {

double LossOnly(Network& net, const Tensor& x, std::span<const int> y, ClassWeights w, bool training,
                std::uint64_t seed, std::vector<std::uint32_t>& fingerprint) {
  Rng rng(seed);
  const Tensor p = net.Forward(x, training, rng);
  fingerprint = net.Fingerprint();
  for (double q : p.data) fingerprint.push_back(q < kProbabilityClip || q > 1.0 - kProbabilityClip);
  return WeightedBce(p.data, y, w) + net.L2Penalty();
}

}  // namespace

GradCheckReport GradCheck(Network& net, const Tensor& x, std::span<const int> y, ClassWeights w,
                          bool check_inputs, bool training, std::uint64_t seed, double h) {
  Rng rng(seed);
  Tensor dx;
  LossAndGradient(net, x, y, w, training, rng, &dx);
  std::vector<std::uint32_t> base, plus, minus;
  LossOnly(net, x, y, w, training, seed, base);

  GradCheckReport report;
  auto compare = [&](double analytic, double& coord, const std::string& label, const Tensor& input) {
    const double saved = coord;
    coord = saved + h;
    const double lp = LossOnly(net, input, y, w, training, seed, plus);
    coord = saved - h;
    const double lm = LossOnly(net, input, y, w, training, seed, minus);
    coord = saved;
    if (plus != base || minus != base) {
      ++report.skipped_kinks;
      return;
    }
    const double numeric = (lp - lm) / (2.0 * h);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
    ++report.checked;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst = label;
    }
  };

  const auto params = net.params();
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    const std::vector<double> analytic = p.grad;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      compare(analytic[i], p.value[i], p.name + "#" + std::to_string(k) + "[" + std::to_string(i) + "]", x);
    }
  }
  if (check_inputs) {
    Tensor probe = x;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      compare(dx.data[i], probe.data[i], "input[" + std::to_string(i) + "]", probe);
    }
  }
  return report;
}

std::unique_ptr<Network> BuildMlp(std::uint64_t seed) {
  Rng rng(seed);
  auto net = std::make_unique<Network>(std::vector<int>{13, 216});
  net->Add(std::make_unique<Flatten>());
  net->Add(std::make_unique<Dense>(13 * 216, 128, 1e-3, rng));
  net->Add(std::make_unique<ReLU>());
  net->Add(std::make_unique<Dropout>(0.4));
  net->Add(std::make_unique<Dense>(128, 32, 1e-3, rng));
  net->Add(std::make_unique<ReLU>());
  net->Add(std::make_unique<Dropout>(0.4));
  net->Add(std::make_unique<Dense>(32, 1, 0.0, rng));
  net->Add(std::make_unique<Sigmoid>());
  return net;
}

std::unique_ptr<Network> BuildCnn(std::uint64_t seed) {
  Rng rng(seed);
  auto net = std::make_unique<Network>(std::vector<int>{13, 216, 1});
  const int kernels[3] = {3, 3, 2};
  int channels = 1;
  for (int k : kernels) {
    net->Add(std::make_unique<Conv2D>(channels, 32, k, k, 0.0, rng));
    net->Add(std::make_unique<ReLU>());
    net->Add(std::make_unique<MaxPool2D>(k, k, 2));
    net->Add(std::make_unique<Dropout>(0.4));
    channels = 32;
  }
  net->Add(std::make_unique<Flatten>());
  net->Add(std::make_unique<Dense>(net->output_shape()[0], 32, 0.0, rng));
  net->Add(std::make_unique<ReLU>());
  net->Add(std::make_unique<Dropout>(0.4));
  net->Add(std::make_unique<Dense>(32, 1, 0.0, rng));
  net->Add(std::make_unique<Sigmoid>());
  return net;
}

}  // namespace skylisten::models
