#ifndef SKYLISTEN_MODELS_LOGREG_H_
#define SKYLISTEN_MODELS_LOGREG_H_

#include <span>
#include <vector>

#include "skylisten/models/layers.h"

namespace skylisten::models {

struct LogRegModel {
  std::vector<double> coef;
  double intercept = 0.0;
};

// 0.5 * |coef|^2 + C * sum_i logloss(y_i, x_i . coef + intercept). The
// intercept is not penalized. X is n x d, row-major.
double LogRegObjective(const LogRegModel& m, std::span<const double> x, int d, std::span<const int> y, double c,
                       std::vector<double>* grad = nullptr);

struct LogRegFit {
  LogRegModel model;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::vector<double> history;  // objective after each Newton step
};

// Truncated Newton: Jacobi-preconditioned conjugate gradient on the exact
// Hessian, Armijo backtracking. Stops once the gradient norm drops below
// `tolerance`. Throws kSingleClass, kNonFinite.
LogRegFit FitLogReg(std::span<const double> x, int d, std::span<const int> y, double c = 1.0,
                    double tolerance = 1e-6, int max_iterations = 200);

std::vector<double> LogRegPredict(const LogRegModel& m, std::span<const double> x, int d);

}  // namespace skylisten::models

#endif  // SKYLISTEN_MODELS_LOGREG_H_
