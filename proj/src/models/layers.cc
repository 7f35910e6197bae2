#include "skylisten/models/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skylisten::models {

namespace {

std::size_t Product(const std::vector<int>& s, std::size_t from = 0) {
  std::size_t p = 1;
  for (std::size_t i = from; i < s.size(); ++i) p *= static_cast<std::size_t>(s[i]);
  return p;
}

void GlorotUniform(Param& p, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : p.value) v = UniformReal(rng, -limit, limit);
}

Param MakeParam(std::string name, std::vector<int> shape, double l2) {
  Param p;
  p.name = std::move(name);
  p.value.assign(Product(shape), 0.0);
  p.grad.assign(p.value.size(), 0.0);
  p.shape = std::move(shape);
  p.l2 = l2;
  return p;
}

[[noreturn]] void Mismatch(const std::string& layer, const std::string& want, const std::vector<int>& got) {
  throw ModelError(ModelErrc::kShapeMismatch, layer + " expects " + want + ", got " + ShapeString(got));
}

}  // namespace

double UniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), data(Product(shape), 0.0) {}

std::string ShapeString(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s + ")";
}

// Dense ----------------------------------------------------------------------

Dense::Dense(int in, int out, double l2, Rng& init_rng)
    : in_(in), out_(out), w_(MakeParam("kernel", {in, out}, l2)), b_(MakeParam("bias", {out}, 0.0)) {
  GlorotUniform(w_, in, out, init_rng);
}

std::vector<int> Dense::OutputShape(const std::vector<int>& in) const {
  if (in.size() != 1 || in[0] != in_) Mismatch("dense", "(" + std::to_string(in_) + ")", in);
  return {out_};
}

Tensor Dense::Forward(const Tensor& x, bool, Rng&) {
  if (x.shape.size() != 2 || x.shape[1] != in_) Mismatch("dense", "N x " + std::to_string(in_), x.shape);
  x_ = x;
  const int n = x.batch();
  Tensor y({n, out_});
  for (int s = 0; s < n; ++s) {
    double* yr = &y.data[static_cast<std::size_t>(s) * out_];
    std::copy(b_.value.begin(), b_.value.end(), yr);
    const double* xr = &x.data[static_cast<std::size_t>(s) * in_];
    for (int i = 0; i < in_; ++i) {
      const double xv = xr[i];
      if (xv == 0.0) continue;
      const double* wr = &w_.value[static_cast<std::size_t>(i) * out_];
      for (int o = 0; o < out_; ++o) yr[o] += xv * wr[o];
    }
  }
  return y;
}

Tensor Dense::Backward(const Tensor& g) {
  const int n = x_.batch();
  Tensor dx({n, in_});
  for (int s = 0; s < n; ++s) {
    const double* gr = &g.data[static_cast<std::size_t>(s) * out_];
    const double* xr = &x_.data[static_cast<std::size_t>(s) * in_];
    double* dxr = &dx.data[static_cast<std::size_t>(s) * in_];
    for (int o = 0; o < out_; ++o) b_.grad[o] += gr[o];
    for (int i = 0; i < in_; ++i) {
      const double* wr = &w_.value[static_cast<std::size_t>(i) * out_];
      double* gw = &w_.grad[static_cast<std::size_t>(i) * out_];
      const double xv = xr[i];
      double acc = 0.0;
      for (int o = 0; o < out_; ++o) {
        gw[o] += xv * gr[o];
        acc += wr[o] * gr[o];
      }
      dxr[i] = acc;
    }
  }
  return dx;
}

// Conv2D ---------------------------------------------------------------------

Conv2D::Conv2D(int in_channels, int filters, int kh, int kw, double l2, Rng& init_rng)
    : cin_(in_channels),
      filters_(filters),
      kh_(kh),
      kw_(kw),
      w_(MakeParam("kernel", {kh, kw, in_channels, filters}, l2)),
      b_(MakeParam("bias", {filters}, 0.0)) {
  GlorotUniform(w_, kh * kw * in_channels, kh * kw * filters, init_rng);
}

std::vector<int> Conv2D::OutputShape(const std::vector<int>& in) const {
  if (in.size() != 3 || in[2] != cin_ || in[0] < kh_ || in[1] < kw_) {
    Mismatch("conv2d", "H x W x " + std::to_string(cin_) + " with H >= " + std::to_string(kh_) +
                           ", W >= " + std::to_string(kw_), in);
  }
  return {in[0] - kh_ + 1, in[1] - kw_ + 1, filters_};
}

Tensor Conv2D::Forward(const Tensor& x, bool, Rng&) {
  if (x.shape.size() != 4) Mismatch("conv2d", "N x H x W x C", x.shape);
  const auto os = OutputShape({x.shape[1], x.shape[2], x.shape[3]});
  x_ = x;
  const int n = x.batch(), h = x.shape[1], w = x.shape[2];
  const int oh = os[0], ow = os[1], f = filters_;
  Tensor y({n, oh, ow, f});
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < oh; ++r) {
      for (int c = 0; c < ow; ++c) {
        double* acc = &y.data[((static_cast<std::size_t>(s) * oh + r) * ow + c) * f];
        std::copy(b_.value.begin(), b_.value.end(), acc);
        for (int i = 0; i < kh_; ++i) {
          for (int j = 0; j < kw_; ++j) {
            const double* xp = &x.data[((static_cast<std::size_t>(s) * h + r + i) * w + c + j) * cin_];
            const double* wp = &w_.value[(static_cast<std::size_t>(i) * kw_ + j) * cin_ * f];
            for (int ch = 0; ch < cin_; ++ch) {
              const double xv = xp[ch];
              const double* wr = wp + static_cast<std::size_t>(ch) * f;
              for (int k = 0; k < f; ++k) acc[k] += xv * wr[k];
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2D::Backward(const Tensor& g) {
  const int n = x_.batch(), h = x_.shape[1], w = x_.shape[2];
  const int oh = g.shape[1], ow = g.shape[2], f = filters_;
  Tensor dx(x_.shape);
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < oh; ++r) {
      for (int c = 0; c < ow; ++c) {
        const double* gr = &g.data[((static_cast<std::size_t>(s) * oh + r) * ow + c) * f];
        for (int k = 0; k < f; ++k) b_.grad[k] += gr[k];
        for (int i = 0; i < kh_; ++i) {
          for (int j = 0; j < kw_; ++j) {
            const std::size_t xoff = ((static_cast<std::size_t>(s) * h + r + i) * w + c + j) * cin_;
            const std::size_t woff = (static_cast<std::size_t>(i) * kw_ + j) * cin_ * f;
            for (int ch = 0; ch < cin_; ++ch) {
              const double xv = x_.data[xoff + ch];
              const double* wr = &w_.value[woff + static_cast<std::size_t>(ch) * f];
              double* gw = &w_.grad[woff + static_cast<std::size_t>(ch) * f];
              double acc = 0.0;
              for (int k = 0; k < f; ++k) {
                gw[k] += xv * gr[k];
                acc += wr[k] * gr[k];
              }
              dx.data[xoff + ch] += acc;
            }
          }
        }
      }
    }
  }
  return dx;
}

// MaxPool2D ------------------------------------------------------------------

MaxPool2D::MaxPool2D(int ph, int pw, int stride) : ph_(ph), pw_(pw), stride_(stride) {}

std::vector<int> MaxPool2D::OutputShape(const std::vector<int>& in) const {
  if (in.size() != 3) Mismatch("maxpool2d", "H x W x C", in);
  return {(in[0] + stride_ - 1) / stride_, (in[1] + stride_ - 1) / stride_, in[2]};
}

Tensor MaxPool2D::Forward(const Tensor& x, bool, Rng&) {
  if (x.shape.size() != 4) Mismatch("maxpool2d", "N x H x W x C", x.shape);
  const int n = x.batch(), h = x.shape[1], w = x.shape[2], ch = x.shape[3];
  const auto os = OutputShape({h, w, ch});
  const int oh = os[0], ow = os[1];
  const int pad_top = std::max((oh - 1) * stride_ + ph_ - h, 0) / 2;
  const int pad_left = std::max((ow - 1) * stride_ + pw_ - w, 0) / 2;
  in_shape_ = x.shape;
  Tensor y({n, oh, ow, ch});
  argmax_.assign(y.size(), 0);
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < oh; ++r) {
      const int r0 = std::max(r * stride_ - pad_top, 0), r1 = std::min(r * stride_ - pad_top + ph_, h);
      for (int c = 0; c < ow; ++c) {
        const int c0 = std::max(c * stride_ - pad_left, 0), c1 = std::min(c * stride_ - pad_left + pw_, w);
        for (int k = 0; k < ch; ++k) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t arg = 0;
          for (int i = r0; i < r1; ++i) {
            for (int j = c0; j < c1; ++j) {
              const std::size_t idx = ((static_cast<std::size_t>(s) * h + i) * w + j) * ch + k;
              if (x.data[idx] > best) {
                best = x.data[idx];
                arg = idx;
              }
            }
          }
          const std::size_t o = ((static_cast<std::size_t>(s) * oh + r) * ow + c) * ch + k;
          y.data[o] = best;
          argmax_[o] = static_cast<std::uint32_t>(arg);
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2D::Backward(const Tensor& g) {
  Tensor dx(in_shape_);
  for (std::size_t o = 0; o < g.size(); ++o) dx.data[argmax_[o]] += g.data[o];
  return dx;
}

void MaxPool2D::AppendFingerprint(std::vector<std::uint32_t>& out) const {
  out.insert(out.end(), argmax_.begin(), argmax_.end());
}

// Dropout --------------------------------------------------------------------

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ModelError(ModelErrc::kBadSpec, "dropout rate must be in [0, 1)");
}

Tensor Dropout::Forward(const Tensor& x, bool training, Rng& rng) {
  scale_.clear();
  if (!training || rate_ == 0.0) return x;
  Tensor y = x;
  scale_.resize(x.size());
  const double keep = 1.0 / (1.0 - rate_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    scale_[i] = UniformReal(rng, 0.0, 1.0) < rate_ ? 0.0 : keep;
    y.data[i] *= scale_[i];
  }
  return y;
}

Tensor Dropout::Backward(const Tensor& g) {
  if (scale_.empty()) return g;
  Tensor dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= scale_[i];
  return dx;
}

void Dropout::AppendFingerprint(std::vector<std::uint32_t>& out) const {
  for (double s : scale_) out.push_back(s != 0.0);
}

// Activations ----------------------------------------------------------------

Tensor ReLU::Forward(const Tensor& x, bool, Rng&) {
  Tensor y = x;
  active_.assign(x.size(), false);
  for (std::size_t i = 0; i < x.size(); ++i) {
    active_[i] = x.data[i] > 0.0;
    if (!active_[i]) y.data[i] = 0.0;
  }
  return y;
}

Tensor ReLU::Backward(const Tensor& g) {
  Tensor dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i) if (!active_[i]) dx.data[i] = 0.0;
  return dx;
}

void ReLU::AppendFingerprint(std::vector<std::uint32_t>& out) const {
  for (bool a : active_) out.push_back(a);
}

Tensor Sigmoid::Forward(const Tensor& x, bool, Rng&) {
  Tensor y = x;
  for (double& v : y.data) {
    if (v >= 0.0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  y_ = y;
  return y;
}

Tensor Sigmoid::Backward(const Tensor& g) {
  Tensor dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= y_.data[i] * (1.0 - y_.data[i]);
  return dx;
}

std::vector<int> Flatten::OutputShape(const std::vector<int>& in) const {
  return {static_cast<int>(Product(in))};
}

Tensor Flatten::Forward(const Tensor& x, bool, Rng&) {
  in_shape_ = x.shape;
  Tensor y;
  y.shape = {x.batch(), static_cast<int>(x.per_sample())};
  y.data = x.data;
  return y;
}

Tensor Flatten::Backward(const Tensor& g) {
  Tensor dx;
  dx.shape = in_shape_;
  dx.data = g.data;
  return dx;
}

}  // namespace skylisten::models
