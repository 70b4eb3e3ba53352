#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gridtune::gp {

// Squared-exponential kernel hyperparameters: signal variance sigma_f^2,
// one length scale per input dimension, and observation noise sigma_n^2.
struct Hyper {
  double signal_var = 1.0;
  std::vector<double> length_scales;
  double noise_var = 0.0;

  friend bool operator==(const Hyper&, const Hyper&) = default;
};

// k(u, v) = sigma_f^2 * exp(-1/2 * sum_i (u_i - v_i)^2 / l_i^2).
// Throws DimensionMismatch when u, v, and length_scales disagree.
double kernel(std::span<const double> u, std::span<const double> v, const Hyper& hyper);

struct Prediction {
  double mean = 0.0;      // metric units
  double variance = 0.0;  // metric units squared, clamped at 0
};

// Gaussian-process regressor over unit-cube inputs, trained in closed form.
//
// Targets are standardized to zero mean / unit standard deviation internally
// (std = 0 falls back to 1), so the hyperparameter grid stays scale-free.
// The covariance K + (sigma_n^2 + jitter) I is factorized as L L^T; jitter
// starts at 1e-9 * sigma_f^2 and escalates tenfold up to 1e-3 * sigma_f^2
// before fit gives up with NotPositiveDefinite. Models are immutable after
// fit and safe to read concurrently.
class Model {
 public:
  // train_u: n distinct rows in [0,1]^d; train_y: n finite targets.
  // Throws DegenerateInput on duplicate rows.
  static Model fit(const std::vector<std::vector<double>>& train_u,
                   std::span<const double> train_y, const Hyper& hyper);

  // Posterior mean and variance at u: m(u) = k(u)^T alpha de-standardized,
  // s^2(u) = (k(u,u) - |L^-1 k(u)|^2) * y_std^2, clamped below at 0.
  Prediction predict(std::span<const double> u) const;

  // -1/2 y^T alpha - sum_i log L_ii - n/2 log(2 pi), in standardized units.
  double log_marginal_likelihood() const;

  std::size_t size() const { return train_u_.size(); }
  std::size_t dim() const { return train_u_.empty() ? 0 : train_u_.front().size(); }
  const Hyper& hyper() const { return hyper_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  double jitter() const { return jitter_; }
  double cholesky_diag(std::size_t i) const { return chol_[i * size() + i]; }

 private:
  Model() = default;

  std::vector<std::vector<double>> train_u_;
  std::vector<double> y_standardized_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  Hyper hyper_;
  double jitter_ = 0.0;
  std::vector<double> chol_;   // n x n row-major, lower triangle of L
  std::vector<double> alpha_;  // (K + (sigma_n^2 + jitter) I)^-1 y_standardized
};

// The fixed selection grid: length scales {0.1, 0.3, 1.0} shared across
// dimensions, signal variance 1 (targets are standardized), noise variance
// {1e-6, 1e-2}.
std::vector<Hyper> default_hyper_grid(std::size_t dim);

// Fits every grid element and returns the one maximizing the log marginal
// likelihood; ties break toward the earliest grid position. Candidates that
// fail to factorize are skipped; AllFitsFailed if none survives.
Hyper select_hypers(const std::vector<std::vector<double>>& train_u,
                    std::span<const double> train_y, const std::vector<Hyper>& grid);

}  // namespace gridtune::gp
