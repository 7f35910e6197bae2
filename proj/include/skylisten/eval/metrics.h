#ifndef SKYLISTEN_EVAL_METRICS_H_
#define SKYLISTEN_EVAL_METRICS_H_

#include <span>
#include <vector>

#include "skylisten/error.h"

namespace skylisten::eval {

enum class EvalErrc { kNoPositives, kLengthMismatch, kBadInput };
using EvalError = CodedError<EvalErrc>;

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct score, thresholds descending; a sample counts as
// predicted positive when its score is >= the threshold.
struct PrCurve {
  std::vector<PrPoint> points;
  double average_precision = 0.0;
};

// Throws kNoPositives, kLengthMismatch, kBadInput (non-finite score or a
// label other than 0/1).
PrCurve PrecisionRecall(std::span<const double> scores, std::span<const int> labels);

// Step-wise sum of (R_n - R_{n-1}) * P_n, no interpolation.
double AveragePrecision(std::span<const double> scores, std::span<const int> labels);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};
MeanStd Summarize(std::span<const double> values);

}  // namespace skylisten::eval

#endif  // SKYLISTEN_EVAL_METRICS_H_
