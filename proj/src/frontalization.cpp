#include "geoaffect/frontalization.hpp"

#include "geoaffect/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace geoaffect {
namespace {

// Flattened coordinate indices that enter the fit: all except x(N-1), y(N-1).
std::vector<Eigen::Index> free_inputs(Eigen::Index n_points) {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<size_t>(2 * n_points - 2));
  for (Eigen::Index c = 0; c < 2 * n_points; ++c) {
    if (c != n_points - 1 && c != 2 * n_points - 1) idx.push_back(c);
  }
  return idx;
}

Eigen::VectorXd standardized_flat(const LandmarkSet& lm) { return flatten(standardize(lm).first.points); }

void check_pair_shapes(std::span<const FrontalPair> pairs, Eigen::Index n_points) {
  for (const auto& pair : pairs) {
    if (pair.posed.n_points() != n_points || pair.frontal.n_points() != n_points) {
      fail(ErrorKind::ShapeMismatch, "frontalizer pairs must all share N=" + std::to_string(n_points));
    }
  }
}

}  // namespace

void validate(const FrontalizerModel& model) {
  const Eigen::Index dims = 2 * model.n_points;
  if (model.n_points < 3 || model.weights.rows() != dims + 1 || model.weights.cols() != dims) {
    fail(ErrorKind::ShapeMismatch, "frontalizer weights must be (2N+1) x 2N");
  }
  if (!model.weights.allFinite()) fail(ErrorKind::NonFinite, "frontalizer weights not finite");
  if (!(model.ridge_lambda >= 0.0)) fail(ErrorKind::ConfigInvalid, "ridge_lambda must be >= 0");
}

FrontalizerModel identity_frontalizer(Eigen::Index n_points) {
  FrontalizerModel model;
  model.n_points = n_points;
  model.weights = Eigen::MatrixXd::Zero(2 * n_points + 1, 2 * n_points);
  model.weights.topRows(2 * n_points).setIdentity();
  return model;
}

FrontalizerModel fit_frontalizer(std::span<const FrontalPair> pairs, double ridge_lambda) {
  if (pairs.empty()) fail(ErrorKind::ShapeMismatch, "no frontalizer training pairs");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    fail(ErrorKind::ConfigInvalid, "ridge_lambda must be finite and non-negative");
  }
  const Eigen::Index n_points = pairs.front().posed.n_points();
  check_pair_shapes(pairs, n_points);

  const auto inputs = free_inputs(n_points);
  const auto n_free = static_cast<Eigen::Index>(inputs.size());
  const auto n_rows = static_cast<Eigen::Index>(pairs.size());

  Eigen::MatrixXd design(n_rows, n_free + 1);
  Eigen::MatrixXd target(n_rows, 2 * n_points);
  FrontalizerModel model;
  model.n_points = n_points;
  model.ridge_lambda = ridge_lambda;

  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& pair = pairs[static_cast<size_t>(r)];
    const Eigen::VectorXd posed = standardized_flat(pair.posed);
    for (Eigen::Index c = 0; c < n_free; ++c) design(r, c) = posed(inputs[static_cast<size_t>(c)]);
    design(r, n_free) = 1.0;
    target.row(r) = standardized_flat(pair.frontal).transpose();
    if (pair.posed.pose) {
      model.max_abs_yaw = std::max(model.max_abs_yaw, std::abs(pair.posed.pose->yaw));
      model.max_abs_pitch = std::max(model.max_abs_pitch, std::abs(pair.posed.pose->pitch));
    }
  }

  Eigen::MatrixXd reduced;
  if (ridge_lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
      fail(ErrorKind::SingularSystem,
           "frontalizer design has rank " + std::to_string(qr.rank()) + " < " +
               std::to_string(design.cols()) + "; add pairs or use ridge_lambda > 0");
    }
    reduced = qr.solve(target);
  } else {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().head(n_free).array() += ridge_lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) fail(ErrorKind::SingularSystem, "frontalizer normal equations not positive definite");
    reduced = llt.solve(design.transpose() * target);
  }

  model.weights = Eigen::MatrixXd::Zero(2 * n_points + 1, 2 * n_points);
  for (Eigen::Index c = 0; c < n_free; ++c) model.weights.row(inputs[static_cast<size_t>(c)]) = reduced.row(c);
  model.weights.row(2 * n_points) = reduced.row(n_free);
  validate(model);
  return model;
}

Eigen::VectorXd apply_affine(const FrontalizerModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  const Eigen::Index dims = 2 * model.n_points;
  if (flat.size() != dims) fail(ErrorKind::ShapeMismatch, "flattened input has wrong length");
  return model.weights.topRows(dims).transpose() * flat + model.weights.row(dims).transpose();
}

LandmarkSet frontalize(const FrontalizerModel& model, const LandmarkSet& lm) {
  if (lm.n_points() != model.n_points) {
    fail(ErrorKind::ShapeMismatch, "landmark set has " + std::to_string(lm.n_points()) +
                                       " points, frontalizer expects " + std::to_string(model.n_points));
  }
  LandmarkSet out = standardize(lm).first;
  out.points = unflatten(apply_affine(model, flatten(out.points)));
  out.pose.reset();
  return out;
}

double fit_objective(const FrontalizerModel& model, std::span<const FrontalPair> pairs) {
  check_pair_shapes(pairs, model.n_points);
  double total = 0.0;
  for (const auto& pair : pairs) {
    total += (apply_affine(model, standardized_flat(pair.posed)) - standardized_flat(pair.frontal)).squaredNorm();
  }
  return total + model.ridge_lambda * model.weights.topRows(2 * model.n_points).squaredNorm();
}

}  // namespace geoaffect
