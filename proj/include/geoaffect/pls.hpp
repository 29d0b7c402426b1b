#pragma once

#include "geoaffect/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace geoaffect {

/// Fitted SIMPLS model. Scores are X_centered * weights; predictions use
/// coefficients = weights * y_loadings^T.
template <typename Scalar>
struct PlsModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector x_mean;
  Vector y_mean;
  Matrix weights;       // R, M x k
  Matrix x_loadings;    // P, M x k
  Matrix y_loadings;    // Q, q x k
  Matrix coefficients;  // B, M x q

  Eigen::Index n_components() const { return weights.cols(); }
  Eigen::Index n_features() const { return x_mean.size(); }
  Eigen::Index n_outputs() const { return y_mean.size(); }
};

/// Fitting-time intermediates. y_scores are the response scores u_a = F_a c_a
/// where F_a is the response residual before component a and c_a the response
/// weight (dominant right singular vector of the deflated cross product).
template <typename Scalar>
struct PlsDiagnostics {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix x_scores;       // T, n x k, orthonormal columns
  Matrix y_scores;       // U, n x k
  Matrix y_weights;      // c_a, q x k
  Matrix loading_basis;  // orthonormalized P, M x k
  Eigen::Index requested_components = 0;
  bool truncated = false;           // fewer components than requested
  bool degenerate_response = false; // centered Y was identically zero
};

template <typename Scalar>
struct PlsFit {
  PlsModel<Scalar> model;
  PlsDiagnostics<Scalar> diagnostics;
};

struct PlsOptions {
  /// Stop early instead of throwing RankExhausted when the deflated
  /// cross-product matrix vanishes.
  bool truncate_on_exhaustion = false;
  /// Above this response count the dominant singular vector comes from
  /// power iteration instead of a thin SVD.
  Eigen::Index svd_max_outputs = 32;
  double power_tolerance = 1e-12;
  int power_max_iterations = 10000;
  double exhaustion_tolerance = 1e-12;
};

namespace detail {

template <typename Scalar>
void flip_to_positive_lead(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r,
                           Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
  const Scalar cutoff = Scalar(1e-12) * r.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (std::abs(r(i)) > cutoff) {
      if (r(i) < Scalar(0)) {
        r = -r;
        c = -c;
      }
      return;
    }
  }
}

// Dominant left/right singular pair of s.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
dominant_singular_pair(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& s,
                       const PlsOptions& options) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector r;
  Vector c;
  if (s.cols() <= options.svd_max_outputs) {
    Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(
        s, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r = svd.matrixU().col(0);
    c = svd.matrixV().col(0);
  } else {
    // Power iteration on s s^T, started from the largest column of s.
    Eigen::Index start = 0;
    s.colwise().squaredNorm().maxCoeff(&start);
    r = s.col(start).normalized();
    for (int it = 0; it < options.power_max_iterations; ++it) {
      Vector next = s * (s.transpose() * r);
      next.normalize();
      const Scalar change = std::min((next - r).norm(), (next + r).norm());
      r = std::move(next);
      if (change < Scalar(options.power_tolerance)) break;
    }
    c = (s.transpose() * r).normalized();
  }
  flip_to_positive_lead(r, c);
  return {std::move(r), std::move(c)};
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

}  // namespace detail

/// SIMPLS on centered data.
///
/// For each component the weight vector r is the dominant left singular
/// vector of the deflated cross product S = X_c^T Y_c, the score t = X_c r is
/// scaled to unit length, and S is deflated against an orthonormal basis of
/// the x-loadings (modified Gram-Schmidt, applied twice). Scores are
/// re-orthogonalized against earlier scores with the same linear combination
/// applied to r, so t = X_c r holds exactly while rounding drift is removed.
template <typename DerivedX, typename DerivedY>
PlsFit<typename DerivedX::Scalar> fit_pls_detailed(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedY>& y,
                                                    Eigen::Index n_components,
                                                    const PlsOptions& options = {}) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  const Eigen::Index q = y.cols();
  if (y.rows() != n) fail(ErrorKind::ShapeMismatch, "X and Y row counts differ");
  if (n < 2) fail(ErrorKind::ShapeMismatch, "PLS needs at least 2 samples");
  if (m < 1 || q < 1) fail(ErrorKind::ShapeMismatch, "PLS needs non-empty X and Y");
  if (n_components < 1 || n_components > std::min(m, n - 1)) {
    fail(ErrorKind::ConfigInvalid, "component count " + std::to_string(n_components) +
                                       " outside [1, min(M, n-1)] = [1, " +
                                       std::to_string(std::min(m, n - 1)) + "]");
  }
  detail::require_finite(x, "X");
  detail::require_finite(y, "Y");

  PlsFit<Scalar> fit;
  auto& model = fit.model;
  auto& diag = fit.diagnostics;
  diag.requested_components = n_components;

  model.x_mean = x.colwise().mean().transpose();
  model.y_mean = y.colwise().mean().transpose();
  const Matrix xc = x.rowwise() - model.x_mean.transpose();
  const Matrix yc = y.rowwise() - model.y_mean.transpose();

  Matrix s = xc.transpose() * yc;
  const Scalar initial_norm = s.norm();

  Matrix r_all = Matrix::Zero(m, n_components);
  Matrix p_all = Matrix::Zero(m, n_components);
  Matrix q_all = Matrix::Zero(q, n_components);
  Matrix t_all = Matrix::Zero(n, n_components);
  Matrix u_all = Matrix::Zero(n, n_components);
  Matrix c_all = Matrix::Zero(q, n_components);
  Matrix v_all = Matrix::Zero(m, n_components);

  if (initial_norm == Scalar(0)) {
    // Centered Y is zero: every score direction has zero covariance and the
    // exact solution is B = 0, so predictions reduce to y_mean.
    diag.degenerate_response = true;
  } else {
    const Scalar x_norm = xc.norm();
    Matrix residual = yc;
    Eigen::Index a = 0;
    for (; a < n_components; ++a) {
      if (s.norm() <= Scalar(options.exhaustion_tolerance) * initial_norm) break;

      auto [r, c] = detail::dominant_singular_pair<Scalar>(s, options);
      Vector t = xc * r;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index b = 0; b < a; ++b) {
          const Scalar proj = t_all.col(b).dot(t);
          t -= proj * t_all.col(b);
          r -= proj * r_all.col(b);
        }
      }
      const Scalar t_norm = t.norm();
      if (!(t_norm > Scalar(1e-14) * x_norm * r.norm())) break;
      t /= t_norm;
      r /= t_norm;

      Vector p = xc.transpose() * t;
      Vector q_load = yc.transpose() * t;
      u_all.col(a) = residual * c;
      residual -= t * q_load.transpose();

      Vector v = p;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index b = 0; b < a; ++b) v -= v_all.col(b).dot(v) * v_all.col(b);
      }
      v.normalize();
      s -= v * (v.transpose() * s);

      r_all.col(a) = r;
      p_all.col(a) = p;
      q_all.col(a) = q_load;
      t_all.col(a) = t;
      c_all.col(a) = c;
      v_all.col(a) = v;
    }

    if (a < n_components) {
      if (!options.truncate_on_exhaustion) {
        fail(ErrorKind::RankExhausted, "cross-product matrix exhausted after " +
                                           std::to_string(a) + " of " +
                                           std::to_string(n_components) + " components");
      }
      if (a == 0) fail(ErrorKind::RankExhausted, "no PLS component could be extracted");
      diag.truncated = true;
      r_all.conservativeResize(Eigen::NoChange, a);
      p_all.conservativeResize(Eigen::NoChange, a);
      q_all.conservativeResize(Eigen::NoChange, a);
      t_all.conservativeResize(Eigen::NoChange, a);
      u_all.conservativeResize(Eigen::NoChange, a);
      c_all.conservativeResize(Eigen::NoChange, a);
      v_all.conservativeResize(Eigen::NoChange, a);
    }
  }

  model.weights = std::move(r_all);
  model.x_loadings = std::move(p_all);
  model.y_loadings = std::move(q_all);
  model.coefficients = model.weights * model.y_loadings.transpose();
  diag.x_scores = std::move(t_all);
  diag.y_scores = std::move(u_all);
  diag.y_weights = std::move(c_all);
  diag.loading_basis = std::move(v_all);
  return fit;
}

template <typename DerivedX, typename DerivedY>
PlsModel<typename DerivedX::Scalar> fit_pls(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& y,
                                            Eigen::Index n_components,
                                            const PlsOptions& options = {}) {
  return fit_pls_detailed(x, y, n_components, options).model;
}

/// The model restricted to its first k components. SIMPLS components do not
/// depend on how many are requested, so this equals a fresh k-component fit.
template <typename Scalar>
PlsModel<Scalar> leading_components(const PlsModel<Scalar>& model, Eigen::Index k) {
  if (k < 1 || k > model.n_components()) {
    fail(ErrorKind::ConfigInvalid, "cannot take " + std::to_string(k) + " of " +
                                       std::to_string(model.n_components()) + " components");
  }
  PlsModel<Scalar> out;
  out.x_mean = model.x_mean;
  out.y_mean = model.y_mean;
  out.weights = model.weights.leftCols(k);
  out.x_loadings = model.x_loadings.leftCols(k);
  out.y_loadings = model.y_loadings.leftCols(k);
  out.coefficients = out.weights * out.y_loadings.transpose();
  return out;
}

}  // namespace geoaffect
