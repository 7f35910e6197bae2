#include "skylisten/models/logreg.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skylisten::models {

namespace {

double Softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

double Logistic(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

std::vector<double> Margins(const LogRegModel& m, std::span<const double> x, int d) {
  const std::size_t n = x.size() / d;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &x[i * d];
    z[i] = m.intercept + std::inner_product(row, row + d, m.coef.begin(), 0.0);
  }
  return z;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

double LogRegObjective(const LogRegModel& m, std::span<const double> x, int d, std::span<const int> y, double c,
                       std::vector<double>* grad) {
  const auto z = Margins(m, x, d);
  double f = 0.5 * Dot(m.coef, m.coef);
  if (grad) {
    grad->assign(d + 1, 0.0);
    std::copy(m.coef.begin(), m.coef.end(), grad->begin());
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    // logloss = softplus(-z) for y = 1, softplus(z) for y = 0.
    f += c * (y[i] == 1 ? Softplus(-z[i]) : Softplus(z[i]));
    if (grad) {
      const double r = c * (Logistic(z[i]) - y[i]);
      const double* row = &x[i * d];
      for (int j = 0; j < d; ++j) (*grad)[j] += r * row[j];
      (*grad)[d] += r;
    }
  }
  return f;
}

LogRegFit FitLogReg(std::span<const double> x, int d, std::span<const int> y, double c, double tolerance,
                    int max_iterations) {
  const std::size_t n = y.size();
  if (d <= 0 || x.size() != n * static_cast<std::size_t>(d)) {
    throw ModelError(ModelErrc::kShapeMismatch, "design matrix must be n x d");
  }
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(n)) {
    throw ModelError(ModelErrc::kSingleClass, "logistic regression needs both classes");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ModelError(ModelErrc::kNonFinite, "non-finite feature value");
  }

  LogRegFit fit;
  fit.model.coef.assign(d, 0.0);
  std::vector<double> g;
  double f = LogRegObjective(fit.model, x, d, y, c, &g);
  for (int iter = 0; iter < max_iterations; ++iter) {
    const double gnorm = std::sqrt(Dot(g, g));
    fit.grad_norm = gnorm;
    if (gnorm < tolerance) break;

    // Curvature weights s_i = p_i (1 - p_i) at the current point.
    const auto z = Margins(fit.model, x, d);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Logistic(z[i]);
      s[i] = c * p * (1.0 - p);
    }
    auto hess_times = [&](const std::vector<double>& v) {
      std::vector<double> out(d + 1, 0.0);
      for (int j = 0; j < d; ++j) out[j] = v[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = &x[i * d];
        const double t = s[i] * (v[d] + std::inner_product(row, row + d, v.begin(), 0.0));
        for (int j = 0; j < d; ++j) out[j] += t * row[j];
        out[d] += t;
      }
      return out;
    };
    std::vector<double> diag(d + 1, 1.0);
    diag[d] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &x[i * d];
      for (int j = 0; j < d; ++j) diag[j] += s[i] * row[j] * row[j];
      diag[d] += s[i];
    }
    for (double& v : diag) v = v > 0 ? v : 1.0;

    // Preconditioned CG on H p = -g.
    std::vector<double> p(d + 1, 0.0), r(d + 1), zc(d + 1), dir(d + 1);
    for (int j = 0; j <= d; ++j) r[j] = -g[j];
    for (int j = 0; j <= d; ++j) zc[j] = r[j] / diag[j];
    dir = zc;
    double rz = Dot(r, zc);
    const double cg_tol = std::min(0.1, std::sqrt(gnorm)) * gnorm;
    for (int k = 0; k < 4 * (d + 1) && std::sqrt(Dot(r, r)) > cg_tol; ++k) {
      const auto hd = hess_times(dir);
      const double curv = Dot(dir, hd);
      if (curv <= 0) break;
      const double alpha = rz / curv;
      for (int j = 0; j <= d; ++j) {
        p[j] += alpha * dir[j];
        r[j] -= alpha * hd[j];
      }
      for (int j = 0; j <= d; ++j) zc[j] = r[j] / diag[j];
      const double rz_next = Dot(r, zc);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (int j = 0; j <= d; ++j) dir[j] = zc[j] + beta * dir[j];
    }
    if (Dot(p, p) == 0.0) {
      for (int j = 0; j <= d; ++j) p[j] = -g[j] / diag[j];
    }

    const double slope = Dot(g, p);
    double step = 1.0;
    LogRegModel trial;
    double f_trial = f;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      trial.coef = fit.model.coef;
      for (int j = 0; j < d; ++j) trial.coef[j] += step * p[j];
      trial.intercept = fit.model.intercept + step * p[d];
      f_trial = LogRegObjective(trial, x, d, y, c);
      if (f_trial <= f + 1e-4 * step * slope) {
        moved = true;
        break;
      }
    }
    if (!moved) break;  // no representable descent left
    fit.model = trial;
    f = LogRegObjective(fit.model, x, d, y, c, &g);
    fit.history.push_back(f);
  }
  fit.objective = f;
  fit.grad_norm = std::sqrt(Dot(g, g));
  return fit;
}

std::vector<double> LogRegPredict(const LogRegModel& m, std::span<const double> x, int d) {
  auto z = Margins(m, x, d);
  for (double& v : z) v = Logistic(v);
  return z;
}

}  // namespace skylisten::models
