#ifndef SKYLISTEN_MODELS_MODEL_H_
#define SKYLISTEN_MODELS_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/features/mfcc.h"
#include "skylisten/models/logreg.h"
#include "skylisten/models/network.h"

namespace skylisten::models {

enum class ModelKind { kLogReg = 0, kMlp = 1, kCnn = 2 };

std::string_view ToString(ModelKind kind);  // "logreg", "mlp", "cnn"
ModelKind ParseModelKind(std::string_view text);

inline constexpr int kFeatureSize = features::kCoeffs * features::kSegmentFrames;  // 2808

// Labelled 13 x 216 examples stored back to back.
struct FeatureSet {
  std::vector<double> x;
  std::vector<int> y;
  std::vector<std::string> ids;

  std::size_t size() const { return y.size(); }
  void Add(const features::FeatureMatrix& m, int label);
  void Append(const FeatureSet& other);
  Tensor AsTensor(const std::vector<int>& per_sample_shape) const;
};

class TrainedModel {
 public:
  // logreg ignores everything in cfg except the seed; its strength is
  // C = logreg_c.
  static TrainedModel Fit(ModelKind kind, const FeatureSet& data, const TrainConfig& cfg,
                          double logreg_c = 1.0);

  std::vector<double> Predict(const FeatureSet& data);
  ModelKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& history() const { return history_; }
  Network* network() { return net_.get(); }
  const LogRegModel& logreg() const { return logreg_; }

  // "SKYMODEL" magic, u32 version, u32 kind, u64 seed, u32 history length
  // and f64 entries, u32 tensor count, then per tensor u32 name length,
  // name, u32 rank, u32 dims and f64 values; little-endian throughout.
  void Save(const std::filesystem::path& path) const;
  static TrainedModel Load(const std::filesystem::path& path);

 private:
  ModelKind kind_ = ModelKind::kLogReg;
  std::uint64_t seed_ = 0;
  std::unique_ptr<Network> net_;
  LogRegModel logreg_;
  std::vector<double> history_;
};

}  // namespace skylisten::models

#endif  // SKYLISTEN_MODELS_MODEL_H_
