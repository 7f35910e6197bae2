#include "skylisten/eval/protocol.h"

#include <cstdio>

#include "skylisten/util/csv.h"

namespace skylisten::eval {

namespace {

std::string Percent(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

std::optional<double> MeanOf(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return Summarize(v).mean;
}

}  // namespace

CvReport CrossValidate(const std::vector<models::FeatureSet>& folds, const FitPredict& fit_predict,
                       std::uint64_t base_seed, std::string model_name) {
  if (folds.size() != kCvFolds) throw EvalError(EvalErrc::kBadInput, "cross validation needs exactly 5 folds");
  CvReport report;
  report.model = std::move(model_name);
  for (int k = 0; k < kCvFolds; ++k) {
    models::FeatureSet train;
    for (int j = 0; j < kCvFolds; ++j) {
      if (j != k) train.Append(folds[j]);
    }
    const auto scores = fit_predict(train, folds[k], base_seed + k + 1);
    report.fold_ap.push_back(AveragePrecision(scores, folds[k].y));
  }
  const MeanStd s = Summarize(report.fold_ap);
  report.mean = s.mean;
  report.std = s.std;
  return report;
}

CvRun CrossValidateModel(models::ModelKind kind, const std::vector<models::FeatureSet>& folds,
                         const models::TrainConfig& cfg, double logreg_c) {
  CvRun run;
  run.report = CrossValidate(
      folds,
      [&](const models::FeatureSet& train, const models::FeatureSet& held, std::uint64_t seed) {
        models::TrainConfig c = cfg;
        c.seed = seed;
        run.models.push_back(models::TrainedModel::Fit(kind, train, c, logreg_c));
        return run.models.back().Predict(held);
      },
      cfg.seed, std::string(models::ToString(kind)));
  return run;
}

EnvReport EvaluateEnvScores(const std::vector<std::string>& model_names, const std::vector<std::string>& hour_ids,
                            const std::vector<std::vector<dataset::Label>>& labels,
                            const std::vector<std::vector<std::vector<double>>>& scores) {
  if (labels.size() != hour_ids.size() || scores.size() != model_names.size()) {
    throw EvalError(EvalErrc::kLengthMismatch, "environment evaluation inputs disagree in size");
  }
  EnvReport r;
  r.models = model_names;
  r.hours = hour_ids;

  // Ignore bins removed once per hour; these index lists serve both modes.
  std::vector<std::vector<std::size_t>> kept(hour_ids.size());
  std::vector<std::vector<int>> truth(hour_ids.size());
  std::vector<bool> has_positive(hour_ids.size(), false);
  for (std::size_t h = 0; h < hour_ids.size(); ++h) {
    for (std::size_t i = 0; i < labels[h].size(); ++i) {
      if (labels[h][i] == dataset::Label::kIgnore) continue;
      kept[h].push_back(i);
      truth[h].push_back(labels[h][i] == dataset::Label::kAircraft ? 1 : 0);
      if (truth[h].back()) has_positive[h] = true;
    }
    if (!has_positive[h]) r.skipped_hours.push_back(hour_ids[h]);
  }

  std::vector<std::vector<double>> per_hour_cols(hour_ids.size());
  std::vector<double> all_cells;
  for (std::size_t m = 0; m < model_names.size(); ++m) {
    if (scores[m].size() != hour_ids.size()) {
      throw EvalError(EvalErrc::kLengthMismatch, model_names[m] + ": one score list per hour expected");
    }
    std::vector<std::optional<double>> row;
    std::vector<double> defined, pooled_scores;
    std::vector<int> pooled_truth;
    for (std::size_t h = 0; h < hour_ids.size(); ++h) {
      if (scores[m][h].size() != labels[h].size()) {
        throw EvalError(EvalErrc::kLengthMismatch, hour_ids[h] + ": score and label counts differ");
      }
      std::vector<double> s;
      for (std::size_t i : kept[h]) s.push_back(scores[m][h][i]);
      pooled_scores.insert(pooled_scores.end(), s.begin(), s.end());
      pooled_truth.insert(pooled_truth.end(), truth[h].begin(), truth[h].end());
      if (!has_positive[h]) {
        row.push_back(std::nullopt);
        continue;
      }
      const double ap = AveragePrecision(s, truth[h]);
      row.push_back(ap);
      defined.push_back(ap);
      per_hour_cols[h].push_back(ap);
      all_cells.push_back(ap);
    }
    r.ap.push_back(std::move(row));
    r.model_mean.push_back(MeanOf(defined));
    r.pooled.push_back(AveragePrecision(pooled_scores, pooled_truth));
  }
  for (const auto& col : per_hour_cols) r.hour_mean.push_back(MeanOf(col));
  r.grand_mean = MeanOf(all_cells);
  r.pooled_summary = Summarize(r.pooled);
  return r;
}

EnvReport EvaluateEnv(std::vector<models::TrainedModel>& trained, const std::vector<EnvHour>& hours) {
  std::vector<std::string> names, ids;
  std::vector<std::vector<dataset::Label>> labels;
  for (const auto& h : hours) {
    ids.push_back(h.id);
    labels.push_back(h.labels);
  }
  std::vector<std::vector<std::vector<double>>> scores;
  for (std::size_t m = 0; m < trained.size(); ++m) {
    names.push_back(std::string(models::ToString(trained[m].kind())) + "_" + std::to_string(m + 1));
    std::vector<std::vector<double>> per_hour;
    for (const auto& h : hours) per_hour.push_back(trained[m].Predict(h.segments));
    scores.push_back(std::move(per_hour));
  }
  return EvaluateEnvScores(names, ids, labels, scores);
}

std::string FormatTrace(const std::vector<dataset::Label>& labels, const std::vector<double>& probabilities) {
  if (labels.size() != probabilities.size()) {
    throw EvalError(EvalErrc::kLengthMismatch, "trace needs one probability per bin");
  }
  std::string out = "t_start_s,ground_truth,probability\n";
  char buf[96];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.1f,%s,%.9f\n", static_cast<double>(i) * dataset::kSegmentS,
                  std::string(dataset::ToString(labels[i])).c_str(), probabilities[i]);
    out += buf;
  }
  return out;
}

std::string FormatTable3(const std::vector<Table3Row>& rows) {
  std::string out = "model,cv_map,cv_std,test_ap,env_map,env_std\n";
  for (const auto& row : rows) {
    util::CsvRow f = {row.model};
    f.push_back(row.cv ? Percent(row.cv->mean) : "");
    f.push_back(row.cv ? Percent(row.cv->std) : "");
    f.push_back(Percent(row.test_ap));
    f.push_back(row.env ? Percent(row.env->mean) : "");
    f.push_back(row.env ? Percent(row.env->std) : "");
    out += util::JoinCsvRow(f) + "\n";
  }
  return out;
}

std::string FormatTable5(const EnvReport& r) {
  util::CsvRow header = {"model"};
  header.insert(header.end(), r.hours.begin(), r.hours.end());
  header.push_back("mean");
  std::string out = util::JoinCsvRow(header) + "\n";
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    util::CsvRow f = {r.models[m]};
    for (const auto& v : r.ap[m]) f.push_back(Percent(v));
    f.push_back(Percent(r.model_mean[m]));
    out += util::JoinCsvRow(f) + "\n";
  }
  util::CsvRow f = {"mean"};
  for (const auto& v : r.hour_mean) f.push_back(Percent(v));
  f.push_back(Percent(r.grand_mean));
  return out + util::JoinCsvRow(f) + "\n";
}

}  // namespace skylisten::eval
