#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>

namespace geoaffect {

/// Default landmark count (eyebrows, eyes, nose and mouth).
inline constexpr Eigen::Index kDefaultLandmarks = 49;

/// N x 2 coordinates, one (x, y) row per landmark.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

struct HeadPose {
  double yaw = 0.0;  // degrees
  double pitch = 0.0;
  double roll = 0.0;

  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

struct LandmarkSet {
  Points points;
  std::optional<std::string> subject_id;
  std::optional<std::string> sample_id;
  std::optional<HeadPose> pose;

  LandmarkSet() = default;
  explicit LandmarkSet(Points pts) : points(std::move(pts)) {}

  Eigen::Index n_points() const { return points.rows(); }
};

struct StandardizationParams {
  Eigen::RowVector2d centroid = Eigen::RowVector2d::Zero();
  double scale = 1.0;  // RMS radius of the centered points
};

/// Throws ShapeMismatch for fewer than 3 points, NonFinite for NaN/Inf.
void validate(const LandmarkSet& lm);

/// Translate the centroid to the origin and scale to unit RMS radius.
/// Rotation is left untouched. Metadata is carried over unchanged.
std::pair<LandmarkSet, StandardizationParams> standardize(const LandmarkSet& lm);

LandmarkSet unstandardize(const LandmarkSet& lm, const StandardizationParams& params);

/// Flattening convention used everywhere: [x0..x(N-1), y0..y(N-1)].
Eigen::VectorXd flatten(const Points& points);
Points unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat);

/// sqrt(mean_i |a_i - b_i|^2); the error metric for landmark sets.
double rms_distance(const Points& a, const Points& b);

}  // namespace geoaffect
