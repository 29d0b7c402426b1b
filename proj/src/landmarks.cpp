#include "geoaffect/landmarks.hpp"

#include "geoaffect/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geoaffect {

void validate(const LandmarkSet& lm) {
  if (lm.n_points() < 3) {
    fail(ErrorKind::ShapeMismatch,
         "landmark set needs at least 3 points, got " + std::to_string(lm.n_points()));
  }
  if (!lm.points.allFinite()) fail(ErrorKind::NonFinite, "landmark coordinates must be finite");
}

std::pair<LandmarkSet, StandardizationParams> standardize(const LandmarkSet& lm) {
  validate(lm);
  StandardizationParams params;
  params.centroid = lm.points.colwise().mean();
  Points centered = lm.points.rowwise() - params.centroid;
  params.scale = std::sqrt(centered.squaredNorm() / static_cast<double>(lm.n_points()));

  // Relative threshold: coincident points leave only rounding noise.
  const double magnitude = lm.points.cwiseAbs().maxCoeff();
  if (!(params.scale > 1e-14 * std::max(magnitude, 1.0))) {
    fail(ErrorKind::DegenerateLandmarks, "all landmarks coincide; scale would be zero");
  }

  LandmarkSet out = lm;
  out.points = centered / params.scale;
  return {std::move(out), params};
}

LandmarkSet unstandardize(const LandmarkSet& lm, const StandardizationParams& params) {
  if (!(params.scale > 0.0)) fail(ErrorKind::DegenerateLandmarks, "scale must be positive");
  LandmarkSet out = lm;
  out.points = (lm.points * params.scale).rowwise() + params.centroid;
  return out;
}

Eigen::VectorXd flatten(const Points& points) {
  const Eigen::Index n = points.rows();
  Eigen::VectorXd flat(2 * n);
  flat.head(n) = points.col(0);
  flat.tail(n) = points.col(1);
  return flat;
}

Points unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() % 2 != 0) fail(ErrorKind::ShapeMismatch, "flattened landmark vector has odd length");
  const Eigen::Index n = flat.size() / 2;
  Points points(n, 2);
  points.col(0) = flat.head(n);
  points.col(1) = flat.tail(n);
  return points;
}

double rms_distance(const Points& a, const Points& b) {
  if (a.rows() != b.rows()) fail(ErrorKind::ShapeMismatch, "landmark counts differ");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

}  // namespace geoaffect
