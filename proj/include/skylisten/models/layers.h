#ifndef SKYLISTEN_MODELS_LAYERS_H_
#define SKYLISTEN_MODELS_LAYERS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "skylisten/error.h"

namespace skylisten::models {

enum class ModelErrc { kShapeMismatch, kSingleClass, kNonFinite, kBadCheckpoint, kBadSpec };
using ModelError = CodedError<ModelErrc>;

using Rng = std::mt19937_64;

// Uniform in [lo, hi) from the raw generator bits, so draws are identical on
// every standard library.
double UniformReal(Rng& rng, double lo, double hi);

// Batch-major dense array. Images are N x H x W x C.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  std::size_t size() const { return data.size(); }
  int batch() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t per_sample() const { return shape.empty() || shape[0] == 0 ? 0 : data.size() / shape[0]; }
};

std::string ShapeString(const std::vector<int>& shape);

struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;
  double l2 = 0.0;  // coefficient of l2 * sum(w^2) in the loss
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string name() const = 0;
  // Per-sample shape in, per-sample shape out. Throws kShapeMismatch.
  virtual std::vector<int> OutputShape(const std::vector<int>& in) const = 0;
  // Caches what Backward needs. `rng` is only drawn from in training mode.
  virtual Tensor Forward(const Tensor& x, bool training, Rng& rng) = 0;
  // Returns dL/dx and adds parameter gradients into Param::grad.
  virtual Tensor Backward(const Tensor& grad_out) = 0;
  virtual std::vector<Param*> params() { return {}; }
  // Discrete state of the last forward pass (active ReLUs, pooling winners,
  // dropout mask). Two passes with equal fingerprints share one smooth
  // piece of the loss surface.
  virtual void AppendFingerprint(std::vector<std::uint32_t>&) const {}
};

class Dense : public Layer {
 public:
  Dense(int in, int out, double l2, Rng& init_rng);
  std::string name() const override { return "dense"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override;
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> params() override { return {&w_, &b_}; }

 private:
  int in_, out_;
  Param w_, b_;  // w is in x out
  Tensor x_;
};

// Valid (unpadded) stride-1 convolution, kernel kh x kw x C_in x filters.
class Conv2D : public Layer {
 public:
  Conv2D(int in_channels, int filters, int kh, int kw, double l2, Rng& init_rng);
  std::string name() const override { return "conv2d"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override;
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> params() override { return {&w_, &b_}; }

 private:
  int cin_, filters_, kh_, kw_;
  Param w_, b_;
  Tensor x_;
};

// Max pooling with "same" padding: output ceil(in / stride), the padding
// split with the smaller half before the data.
class MaxPool2D : public Layer {
 public:
  MaxPool2D(int ph, int pw, int stride);
  std::string name() const override { return "maxpool2d"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override;
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;
  void AppendFingerprint(std::vector<std::uint32_t>& out) const override;

 private:
  int ph_, pw_, stride_;
  std::vector<int> in_shape_;
  std::vector<std::uint32_t> argmax_;  // flat input index per output element
};

// Inverted dropout: kept units are scaled by 1 / (1 - rate) while training;
// identity at inference.
class Dropout : public Layer {
 public:
  explicit Dropout(double rate);
  std::string name() const override { return "dropout"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override { return in; }
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;
  void AppendFingerprint(std::vector<std::uint32_t>& out) const override;

 private:
  double rate_;
  std::vector<double> scale_;  // empty at inference
};

class ReLU : public Layer {
 public:
  std::string name() const override { return "relu"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override { return in; }
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;
  void AppendFingerprint(std::vector<std::uint32_t>& out) const override;

 private:
  std::vector<bool> active_;
};

class Sigmoid : public Layer {
 public:
  std::string name() const override { return "sigmoid"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override { return in; }
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;

 private:
  Tensor y_;
};

class Flatten : public Layer {
 public:
  std::string name() const override { return "flatten"; }
  std::vector<int> OutputShape(const std::vector<int>& in) const override;
  Tensor Forward(const Tensor& x, bool training, Rng& rng) override;
  Tensor Backward(const Tensor& grad_out) override;

 private:
  std::vector<int> in_shape_;
};

}  // namespace skylisten::models

#endif  // SKYLISTEN_MODELS_LAYERS_H_
