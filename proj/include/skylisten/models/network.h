#ifndef SKYLISTEN_MODELS_NETWORK_H_
#define SKYLISTEN_MODELS_NETWORK_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "skylisten/models/layers.h"

namespace skylisten::models {

inline constexpr double kProbabilityClip = 1e-7;

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
};

// n / (2 * n_c) per class. Throws kSingleClass.
ClassWeights BalancedClassWeights(std::span<const int> labels);

// Mean over the batch of w_y * -(y log p + (1 - y) log(1 - p)), p clipped
// to [1e-7, 1 - 1e-7]. Optionally writes dLoss/dp (zero where clipped).
double WeightedBce(std::span<const double> p, std::span<const int> y, ClassWeights w,
                   std::vector<double>* grad = nullptr);

class Network {
 public:
  explicit Network(std::vector<int> input_shape);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Appends a layer; throws kShapeMismatch if it cannot take the current
  // output shape.
  void Add(std::unique_ptr<Layer> layer);

  const std::vector<int>& input_shape() const { return shapes_.front(); }
  const std::vector<int>& output_shape() const { return shapes_.back(); }
  // Per-sample shapes: the input, then the output of every layer.
  const std::vector<std::vector<int>>& shape_walk() const { return shapes_; }
  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

  Tensor Forward(const Tensor& x, bool training, Rng& rng);
  // Returns dL/dx; parameter gradients accumulate.
  Tensor Backward(const Tensor& grad_out);

  std::vector<Param*> params();
  std::size_t parameter_count();
  void ZeroGrad();
  double L2Penalty();
  std::vector<std::uint32_t> Fingerprint() const;

  // Inference-mode probabilities, one per sample, in chunks of 216.
  std::vector<double> Predict(const Tensor& x);

 private:
  std::vector<std::vector<int>> shapes_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Weighted BCE plus L2 penalty; fills parameter gradients (after zeroing)
// and returns the loss. `input_grad`, when given, receives dLoss/dx.
double LossAndGradient(Network& net, const Tensor& x, std::span<const int> y, ClassWeights w,
                       bool training, Rng& rng, Tensor* input_grad = nullptr);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 216;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;  // shuffling and dropout
  bool balanced_class_weights = true;
};

// Mini-batch Adam. Each epoch reshuffles; the last partial batch is used.
// Returns the per-epoch loss (sample-weighted mean over the epoch's batches).
std::vector<double> Train(Network& net, const Tensor& x, std::span<const int> y, const TrainConfig& cfg);

inline constexpr double kGradCheckFloor = 1e-6;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  std::string worst;  // "param[index]" or "input[index]"
};

// Central differences with step h on every parameter and, optionally, every
// input coordinate. A coordinate is skipped when either perturbed pass lands
// on a different smooth piece (ReLU mask, pooling winner, clip state) than
// the unperturbed pass. Relative error is |a - n| / max(|a|, |n|, floor);
// below the floor the h = 1e-5 difference quotient is mostly roundoff.
GradCheckReport GradCheck(Network& net, const Tensor& x, std::span<const int> y, ClassWeights w,
                          bool check_inputs = true, bool training = false, std::uint64_t seed = 0,
                          double h = 1e-5);

// Flatten -> Dense 128 ReLU (L2 1e-3) -> Dropout 0.4 -> Dense 32 ReLU
// (L2 1e-3) -> Dropout 0.4 -> Dense 1 sigmoid, on 13 x 216 inputs.
std::unique_ptr<Network> BuildMlp(std::uint64_t seed);
// Three Conv2D(32) + ReLU + MaxPool(same, stride 2) + Dropout 0.4 blocks
// (kernels 3x3, 3x3, 2x2; pools 3x3, 3x3, 2x2) -> Flatten -> Dense 32 ReLU
// -> Dropout 0.4 -> Dense 1 sigmoid, on 13 x 216 x 1 inputs.
std::unique_ptr<Network> BuildCnn(std::uint64_t seed);

}  // namespace skylisten::models

#endif  // SKYLISTEN_MODELS_NETWORK_H_
