#pragma once

#include "geoaffect/landmarks.hpp"

#include <Eigen/Dense>

#include <span>

namespace geoaffect {

inline constexpr double kDefaultFrontalizerLambda = 1e-3;

/// Affine map from flattened standardized posed coordinates to flattened
/// frontal coordinates: out = [flat(x), 1] * weights.
struct FrontalizerModel {
  Eigen::MatrixXd weights;  // (2N+1) x 2N, last row is the bias
  Eigen::Index n_points = 0;
  double max_abs_yaw = 0.0;    // pose envelope of the training pairs
  double max_abs_pitch = 0.0;
  double ridge_lambda = 0.0;
};

struct FrontalPair {
  LandmarkSet posed;
  LandmarkSet frontal;
};

/// Identity on coordinates with zero bias; frontalize() then reduces to
/// standardize().
FrontalizerModel identity_frontalizer(Eigen::Index n_points);

/// Ridge-regularized least squares fit of the affine map over standardized
/// pairs; the bias row is not penalized.
///
/// Standardized sets always have zero mean x and zero mean y, so the last x
/// and last y inputs are linear combinations of the others. The fit uses the
/// remaining 2N-2 coordinates plus bias and leaves the two redundant weight
/// rows at zero, which keeps the unregularized problem well posed.
///
/// Throws ShapeMismatch when point counts differ, SingularSystem when
/// ridge_lambda is 0 and the reduced design matrix is rank deficient.
FrontalizerModel fit_frontalizer(std::span<const FrontalPair> pairs,
                                 double ridge_lambda = kDefaultFrontalizerLambda);

/// Standardize, then one matrix-vector product. The result lives in
/// standardized space.
LandmarkSet frontalize(const FrontalizerModel& model, const LandmarkSet& lm);

/// The affine map on an already flattened input (no standardization).
Eigen::VectorXd apply_affine(const FrontalizerModel& model,
                             const Eigen::Ref<const Eigen::VectorXd>& flat);

/// Penalized residual sum of squares of the model on the given pairs, in the
/// same standardized coordinates the fit minimizes.
double fit_objective(const FrontalizerModel& model, std::span<const FrontalPair> pairs);

void validate(const FrontalizerModel& model);

}  // namespace geoaffect
