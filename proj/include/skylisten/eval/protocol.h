#ifndef SKYLISTEN_EVAL_PROTOCOL_H_
#define SKYLISTEN_EVAL_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skylisten/dataset/segment.h"
#include "skylisten/eval/metrics.h"
#include "skylisten/models/model.h"

namespace skylisten::eval {

inline constexpr int kCvFolds = 5;

struct CvReport {
  std::string model;
  std::vector<double> fold_ap;  // folds 1..5
  double mean = 0.0;
  double std = 0.0;
};

// Trains on `train`, returns scores for `held_out`.
using FitPredict = std::function<std::vector<double>(const models::FeatureSet& train,
                                                     const models::FeatureSet& held_out, std::uint64_t seed)>;

// folds[k] holds fold k + 1. Fold k is scored by a model trained on the
// other four with seed = base_seed + k + 1.
CvReport CrossValidate(const std::vector<models::FeatureSet>& folds, const FitPredict& fit_predict,
                       std::uint64_t base_seed, std::string model_name);

struct CvRun {
  CvReport report;
  std::vector<models::TrainedModel> models;  // one per held-out fold
};
CvRun CrossValidateModel(models::ModelKind kind, const std::vector<models::FeatureSet>& folds,
                         const models::TrainConfig& cfg, double logreg_c = 1.0);

// One annotated hour: a feature matrix and a label per 5 s bin.
struct EnvHour {
  std::string id;
  std::vector<dataset::Label> labels;
  models::FeatureSet segments;
};

struct EnvReport {
  std::vector<std::string> models;
  std::vector<std::string> hours;
  // ap[m][h]; absent for hours without an aircraft bin.
  std::vector<std::vector<std::optional<double>>> ap;
  std::vector<std::optional<double>> model_mean;  // over defined hours
  std::vector<std::optional<double>> hour_mean;   // over models
  std::optional<double> grand_mean;
  std::vector<double> pooled;  // per model, all hours concatenated
  MeanStd pooled_summary;
  std::vector<std::string> skipped_hours;
};

// scores[m][h] holds one score per bin of hour h. Ignore bins are dropped
// before scoring in both aggregation modes.
EnvReport EvaluateEnvScores(const std::vector<std::string>& model_names, const std::vector<std::string>& hour_ids,
                            const std::vector<std::vector<dataset::Label>>& labels,
                            const std::vector<std::vector<std::vector<double>>>& scores);
EnvReport EvaluateEnv(std::vector<models::TrainedModel>& models, const std::vector<EnvHour>& hours);

// t_start_s,ground_truth,probability with one row per bin.
std::string FormatTrace(const std::vector<dataset::Label>& labels, const std::vector<double>& probabilities);

struct Table3Row {
  std::string model;
  std::optional<CvReport> cv;
  std::optional<double> test_ap;
  std::optional<MeanStd> env;
};
// model,cv_map,cv_std,test_ap,env_map,env_std as percentages; empty cells
// for anything not evaluated.
std::string FormatTable3(const std::vector<Table3Row>& rows);
// model,<hour ids...>,mean then a final "mean" row, percentages.
std::string FormatTable5(const EnvReport& report);

}  // namespace skylisten::eval

#endif  // SKYLISTEN_EVAL_PROTOCOL_H_
