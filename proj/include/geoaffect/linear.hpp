#pragma once

#include "geoaffect/error.hpp"
#include "geoaffect/pls.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

namespace geoaffect {

enum class LinearKind { Ols, Ridge, Pcr };

template <typename Scalar>
struct LinearModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LinearKind kind = LinearKind::Ols;
  double alpha = 0.0;          // Ridge only
  Eigen::Index components = 0; // PCR only
  Vector x_mean;
  Vector y_mean;
  Matrix coefficients;  // M x q
  /// Set when singular values below the cutoff were dropped (OLS and
  /// Ridge(0) on rank-deficient data).
  bool pseudo_inverse = false;

  Eigen::Index n_features() const { return x_mean.size(); }
  Eigen::Index n_outputs() const { return y_mean.size(); }
};

/// Anything with centering statistics and an M x q coefficient matrix.
template <typename Model>
concept LinearPredictor = requires(const Model& m) {
  m.x_mean;
  m.y_mean;
  m.coefficients;
};

/// Y_hat = (X - x_mean) B + y_mean.
template <LinearPredictor Model, typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> predict(
    const Model& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != model.x_mean.size()) {
    fail(ErrorKind::ShapeMismatch, "feature width " + std::to_string(x.cols()) +
                                       " does not match model width " +
                                       std::to_string(model.x_mean.size()));
  }
  return ((x.rowwise() - model.x_mean.transpose()) * model.coefficients).rowwise() +
         model.y_mean.transpose();
}

/// Per-column mean squared error.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> mse(
    const Eigen::MatrixBase<DerivedA>& y, const Eigen::MatrixBase<DerivedB>& y_hat) {
  if (y.rows() != y_hat.rows() || y.cols() != y_hat.cols()) {
    fail(ErrorKind::ShapeMismatch, "MSE operands differ in shape");
  }
  if (y.rows() < 1) fail(ErrorKind::ShapeMismatch, "MSE needs at least one row");
  return (y - y_hat).colwise().squaredNorm().transpose() / static_cast<typename DerivedA::Scalar>(y.rows());
}

struct OlsOptions {
  bool allow_pseudo_inverse = true;
  double singular_cutoff = 1e-10;  // relative to the largest singular value
};

namespace detail {

template <typename Scalar>
struct CenteredSvd {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector x_mean;
  Vector y_mean;
  Matrix u;  // n x r
  Vector sigma;
  Matrix v;  // M x r
  Matrix uty;  // U^T Y_c, r x q
};

template <typename DerivedX, typename DerivedY>
CenteredSvd<typename DerivedX::Scalar> centered_svd(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (x.rows() != y.rows()) fail(ErrorKind::ShapeMismatch, "X and Y row counts differ");
  if (x.rows() < 2) fail(ErrorKind::ShapeMismatch, "regression needs at least 2 samples");
  require_finite(x, "X");
  require_finite(y, "Y");

  CenteredSvd<Scalar> out;
  out.x_mean = x.colwise().mean().transpose();
  out.y_mean = y.colwise().mean().transpose();
  const Matrix xc = x.rowwise() - out.x_mean.transpose();
  const Matrix yc = y.rowwise() - out.y_mean.transpose();
  Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  out.uty = out.u.transpose() * yc;
  return out;
}

template <typename Scalar>
Eigen::Index numerical_rank(const CenteredSvd<Scalar>& svd, double cutoff) {
  if (svd.sigma.size() == 0 || svd.sigma(0) == Scalar(0)) return 0;
  const Scalar threshold = Scalar(cutoff) * svd.sigma(0);
  Eigen::Index rank = 0;
  while (rank < svd.sigma.size() && svd.sigma(rank) > threshold) ++rank;
  return rank;
}

// B = V diag(filter(sigma)) U^T Y_c over the first `count` singular triplets.
template <typename Scalar, typename Filter>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> filtered_solution(
    const CenteredSvd<Scalar>& svd, Eigen::Index count, Filter filter) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gains(count);
  for (Eigen::Index i = 0; i < count; ++i) gains(i) = filter(svd.sigma(i));
  return svd.v.leftCols(count) * (gains.asDiagonal() * svd.uty.topRows(count));
}

template <typename Scalar>
LinearModel<Scalar> ols_from_svd(const CenteredSvd<Scalar>& svd, const OlsOptions& options) {
  const Eigen::Index rank = numerical_rank(svd, options.singular_cutoff);
  const bool deficient = rank < svd.v.rows();
  if (deficient && !options.allow_pseudo_inverse) {
    fail(ErrorKind::SingularSystem, "X has numerical rank " + std::to_string(rank) + " < " +
                                        std::to_string(svd.v.rows()) + " columns");
  }
  LinearModel<Scalar> model;
  model.kind = LinearKind::Ols;
  model.x_mean = svd.x_mean;
  model.y_mean = svd.y_mean;
  model.coefficients = filtered_solution(svd, rank, [](Scalar s) { return Scalar(1) / s; });
  model.pseudo_inverse = deficient;
  return model;
}

}  // namespace detail

/// Least squares on centered data via the thin SVD. Rank deficiency falls
/// back to the pseudo-inverse (cutoff 1e-10 * sigma_max) unless disabled.
template <typename DerivedX, typename DerivedY>
LinearModel<typename DerivedX::Scalar> fit_ols(const Eigen::MatrixBase<DerivedX>& x,
                                               const Eigen::MatrixBase<DerivedY>& y,
                                               const OlsOptions& options = {}) {
  return detail::ols_from_svd(detail::centered_svd(x, y), options);
}

/// Ridge: minimizes |Y_c - X_c B|^2 + alpha |B|^2. alpha = 0 is OLS.
template <typename DerivedX, typename DerivedY>
LinearModel<typename DerivedX::Scalar> fit_ridge(const Eigen::MatrixBase<DerivedX>& x,
                                                 const Eigen::MatrixBase<DerivedY>& y,
                                                 double alpha) {
  using Scalar = typename DerivedX::Scalar;
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::ConfigInvalid, "ridge alpha must be finite and non-negative");
  }
  const auto svd = detail::centered_svd(x, y);
  LinearModel<Scalar> model;
  if (alpha == 0.0) {
    model = detail::ols_from_svd(svd, OlsOptions{});
  } else {
    model.x_mean = svd.x_mean;
    model.y_mean = svd.y_mean;
    const auto a = static_cast<Scalar>(alpha);
    model.coefficients = detail::filtered_solution(svd, svd.sigma.size(),
                                                   [a](Scalar s) { return s / (s * s + a); });
  }
  model.kind = LinearKind::Ridge;
  model.alpha = alpha;
  return model;
}

/// Principal component regression: least squares on the scores of the top-k
/// principal directions of centered X.
template <typename DerivedX, typename DerivedY>
LinearModel<typename DerivedX::Scalar> fit_pcr(const Eigen::MatrixBase<DerivedX>& x,
                                               const Eigen::MatrixBase<DerivedY>& y,
                                               Eigen::Index n_components) {
  using Scalar = typename DerivedX::Scalar;
  if (n_components < 1 || n_components > std::min<Eigen::Index>(x.cols(), x.rows() - 1)) {
    fail(ErrorKind::ConfigInvalid, "PCR component count " + std::to_string(n_components) +
                                       " outside [1, min(M, n-1)]");
  }
  const auto svd = detail::centered_svd(x, y);
  if (detail::numerical_rank(svd, 1e-10) < n_components) {
    fail(ErrorKind::SingularSystem, "X has fewer than " + std::to_string(n_components) +
                                        " non-degenerate principal directions");
  }
  LinearModel<Scalar> model;
  model.kind = LinearKind::Pcr;
  model.components = n_components;
  model.x_mean = svd.x_mean;
  model.y_mean = svd.y_mean;
  model.coefficients =
      detail::filtered_solution(svd, n_components, [](Scalar s) { return Scalar(1) / s; });
  return model;
}

}  // namespace geoaffect
