#include "skylisten/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skylisten::eval {

PrCurve PrecisionRecall(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw EvalError(EvalErrc::kLengthMismatch, "scores and labels differ in length");
  }
  double positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw EvalError(EvalErrc::kBadInput, "non-finite score");
    if (labels[i] != 0 && labels[i] != 1) throw EvalError(EvalErrc::kBadInput, "labels must be 0 or 1");
    positives += labels[i];
  }
  if (positives == 0) throw EvalError(EvalErrc::kNoPositives, "average precision needs a positive sample");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PrCurve curve;
  double tp = 0, fp = 0, prev_recall = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) (labels[order[i]] ? tp : fp) += 1;
    const double recall = tp / positives;
    const double precision = tp / (tp + fp);
    curve.average_precision += (recall - prev_recall) * precision;
    prev_recall = recall;
    curve.points.push_back({threshold, precision, recall});
  }
  return curve;
}

double AveragePrecision(std::span<const double> scores, std::span<const int> labels) {
  return PrecisionRecall(scores, labels).average_precision;
}

MeanStd Summarize(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

}  // namespace skylisten::eval
