#include "gridtune/gp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gridtune/errors.hpp"

namespace gridtune::gp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// In-place lower Cholesky of the row-major n x n matrix a. Returns false
// when a pivot is not strictly positive (matrix not positive definite).
bool cholesky_in_place(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double lj = std::sqrt(d);
    a[j * n + j] = lj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / lj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
  }
  return true;
}

// Solves L x = b by forward substitution.
std::vector<double> solve_lower(const std::vector<double>& l, std::size_t n,
                                std::span<const double> b) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
    x[i] = s / l[i * n + i];
  }
  return x;
}

// Solves L^T x = b by back substitution.
std::vector<double> solve_lower_transposed(const std::vector<double>& l, std::size_t n,
                                           std::span<const double> b) {
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
    x[i] = s / l[i * n + i];
  }
  return x;
}

void check_hyper(const Hyper& hyper, std::size_t dim) {
  if (hyper.length_scales.size() != dim)
    fail(Errc::dimension_mismatch,
         "hyper has " + std::to_string(hyper.length_scales.size()) + " length scales for " +
             std::to_string(dim) + " dimensions");
  if (!(hyper.signal_var > 0.0) || !std::isfinite(hyper.signal_var))
    fail(Errc::validation_error, "signal variance must be positive and finite");
  if (!(hyper.noise_var >= 0.0) || !std::isfinite(hyper.noise_var))
    fail(Errc::validation_error, "noise variance must be nonnegative and finite");
  for (double l : hyper.length_scales)
    if (!(l > 0.0) || !std::isfinite(l))
      fail(Errc::validation_error, "length scales must be positive and finite");
}

}  // namespace

double kernel(std::span<const double> u, std::span<const double> v, const Hyper& hyper) {
  if (u.size() != v.size())
    fail(Errc::dimension_mismatch, "kernel inputs of size " + std::to_string(u.size()) + " and " +
                                       std::to_string(v.size()));
  check_hyper(hyper, u.size());
  double q = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = (u[i] - v[i]) / hyper.length_scales[i];
    q += d * d;
  }
  return hyper.signal_var * std::exp(-0.5 * q);
}

Model Model::fit(const std::vector<std::vector<double>>& train_u, std::span<const double> train_y,
                 const Hyper& hyper) {
  const std::size_t n = train_u.size();
  if (n == 0) fail(Errc::validation_error, "fit requires at least one training point");
  if (train_y.size() != n)
    fail(Errc::dimension_mismatch, std::to_string(n) + " inputs but " +
                                       std::to_string(train_y.size()) + " targets");
  const std::size_t d = train_u.front().size();
  check_hyper(hyper, d);
  for (const auto& row : train_u)
    if (row.size() != d) fail(Errc::dimension_mismatch, "ragged training inputs");
  for (double y : train_y)
    if (!std::isfinite(y)) fail(Errc::validation_error, "training targets must be finite");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (train_u[i] == train_u[j])
        fail(Errc::degenerate_input,
             "duplicate training rows " + std::to_string(i) + " and " + std::to_string(j));

  Model m;
  m.train_u_ = train_u;
  m.hyper_ = hyper;

  double mean = 0.0;
  for (double y : train_y) mean += y;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double y : train_y) var += (y - mean) * (y - mean);
  var /= static_cast<double>(n);
  m.y_mean_ = mean;
  m.y_std_ = var > 0.0 ? std::sqrt(var) : 1.0;
  m.y_standardized_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.y_standardized_[i] = (train_y[i] - m.y_mean_) / m.y_std_;

  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel(train_u[i], train_u[j], hyper);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }

  for (double jitter = 1e-9 * hyper.signal_var; jitter <= 1e-3 * hyper.signal_var * 1.0000001;
       jitter *= 10.0) {
    std::vector<double> a = k;
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += hyper.noise_var + jitter;
    if (cholesky_in_place(a, n)) {
      m.jitter_ = jitter;
      m.chol_ = std::move(a);
      const std::vector<double> z = solve_lower(m.chol_, n, m.y_standardized_);
      m.alpha_ = solve_lower_transposed(m.chol_, n, z);
      return m;
    }
  }
  fail(Errc::not_positive_definite, "covariance not positive definite after jitter escalation");
}

Prediction Model::predict(std::span<const double> u) const {
  const std::size_t n = size();
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = kernel(u, train_u_[i], hyper_);

  double mean_std = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_std += ks[i] * alpha_[i];

  const std::vector<double> v = solve_lower(chol_, n, ks);
  double var_std = kernel(u, u, hyper_);
  for (double vi : v) var_std -= vi * vi;
  if (var_std < 0.0) var_std = 0.0;

  return {y_mean_ + y_std_ * mean_std, var_std * y_std_ * y_std_};
}

double Model::log_marginal_likelihood() const {
  const std::size_t n = size();
  double fit_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) fit_term += y_standardized_[i] * alpha_[i];
  double log_det_half = 0.0;
  for (std::size_t i = 0; i < n; ++i) log_det_half += std::log(chol_[i * n + i]);
  return -0.5 * fit_term - log_det_half - 0.5 * static_cast<double>(n) * kLog2Pi;
}

std::vector<Hyper> default_hyper_grid(std::size_t dim) {
  std::vector<Hyper> grid;
  for (double l : {0.1, 0.3, 1.0})
    for (double noise : {1e-6, 1e-2})
      grid.push_back(Hyper{1.0, std::vector<double>(dim, l), noise});
  return grid;
}

Hyper select_hypers(const std::vector<std::vector<double>>& train_u,
                    std::span<const double> train_y, const std::vector<Hyper>& grid) {
  if (grid.empty()) fail(Errc::validation_error, "hyperparameter grid is empty");
  const Hyper* best = nullptr;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (const Hyper& candidate : grid) {
    double lml;
    try {
      lml = Model::fit(train_u, train_y, candidate).log_marginal_likelihood();
    } catch (const TuneError& e) {
      if (e.code() == Errc::not_positive_definite) continue;
      throw;
    }
    if (!best || lml > best_lml) {
      best = &candidate;
      best_lml = lml;
    }
  }
  if (!best) fail(Errc::all_fits_failed, "no hyperparameter candidate factorized");
  return *best;
}

}  // namespace gridtune::gp
