#pragma once

#include "geoaffect/frontalization.hpp"
#include "geoaffect/landmarks.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace geoaffect {

/// A point of the polar circumplex: Neutral at the origin, intensity is the
/// distance from it.
struct AffectLabel {
  double arousal = 0.0;
  double valence = 0.0;
  double intensity = 0.0;

  friend bool operator==(const AffectLabel&, const AffectLabel&) = default;
};

/// angle in degrees measured from the positive valence axis towards positive
/// arousal; radius in [0, 1].
AffectLabel affect_from_polar(double angle_deg, double radius);

/// Throws ConfigInvalid when the ranges or the intensity identity are violated.
void validate(const AffectLabel& label);

/// Angle uniform on [0, 360), radius area-uniform on the unit disc.
AffectLabel sample_affect(std::mt19937_64& rng);

struct PoseRanges {
  double yaw_max = 45.0;  // degrees, sampled uniformly in [-max, max]
  double pitch_max = 15.0;
  double roll_max = 0.0;
};

struct GeneratorConfig {
  int n_subjects = 250;
  int samples_per_subject = 24;
  double identity_variance = 1.0;  // variance of each identity-mode coefficient
  double expression_gain = 1.0;
  double nonlinearity_gain = 0.5;
  double noise_std = 0.01;  // per-coordinate 3D jitter, standardized units
  std::uint64_t seed = 20211;
  PoseRanges pose_ranges;
  int posed_copies = 0;  // posed renderings per sample, each with frontal truth
};

void validate(const GeneratorConfig& config);

using Points3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// The fixed 49-point face. Its frontal projection is standardized (zero
/// centroid, unit RMS radius); depth is centered too.
///
/// Index layout: 0-9 eyebrows (0-4 image-left, 5-9 image-right), 10-13 nose
/// bridge, 14-18 nostril line, 19-24 and 25-30 eyes, 31-42 outer lip contour
/// (31 and 37 are the mouth corners), 43-48 inner lip contour.
const Points3& neutral_template();

/// Per-unit displacement fields, in the template's units.
const Points3& arousal_mode();   // brow raise (inner > outer), eye and mouth opening
const Points3& valence_mode();   // mouth-corner spread and lift, brow spacing
const Points3& cross_mode();     // a*v term: jaw drop with upper-lip lift
const std::vector<Points3>& identity_modes();

inline constexpr Eigen::Index kMouthCornerLeft = 31;
inline constexpr Eigen::Index kMouthCornerRight = 37;

struct SubjectParams {
  Points3 identity_offset;
};

SubjectParams sample_subject(const GeneratorConfig& config, std::mt19937_64& rng);

/// 3D face for a label: template + identity + expression + cross term, plus
/// isotropic jitter of noise_std drawn from rng.
Points3 synth_face_3d(const AffectLabel& label, const SubjectParams& subject,
                      const GeneratorConfig& config, std::mt19937_64& rng);

/// Frontal orthographic view of synth_face_3d.
LandmarkSet synth_face(const AffectLabel& label, const SubjectParams& subject,
                       const GeneratorConfig& config, std::mt19937_64& rng);

/// Rotation R = Ry(yaw) * Rx(pitch) * Rz(roll) (intrinsic yaw, then pitch,
/// then roll) applied to column vectors, then orthographic projection onto
/// (x, y). Yaw turns +z (towards the viewer) into +x.
Eigen::Matrix3d rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg);
LandmarkSet rotate_project(const Points3& face, double yaw_deg, double pitch_deg, double roll_deg);

/// Upper bound L with RMS(f(l1) - f(l2)) <= L * |l1 - l2|_AV for noise-free
/// frontal faces of one subject, from operator norms of the mode matrices.
double lipschitz_bound(const GeneratorConfig& config);

/// Positive c with RMS(f(l1) - f(l2)) >= c * |l1 - l2|_AV on the disc
/// (noise-free, same subject); zero or negative when injectivity of the
/// frontal view cannot be certified for these gains.
double injectivity_floor(const GeneratorConfig& config);

struct Sample {
  LandmarkSet landmarks;
  std::optional<AffectLabel> label;
};

struct Dataset {
  std::vector<Sample> frontal;
  /// posed[i] is a rotated rendering of the face whose true frontal view is
  /// posed_truth[i].
  std::vector<Sample> posed;
  std::vector<LandmarkSet> posed_truth;
};

/// Deterministic in config. Every subject draws from its own substream so the
/// output does not depend on generation order.
Dataset gen_dataset(const GeneratorConfig& config);

std::vector<FrontalPair> frontal_pairs(const Dataset& dataset);

/// Per-subject random stream derived from the master seed.
std::mt19937_64 subject_stream(std::uint64_t seed, std::uint64_t subject, std::uint64_t purpose);

std::string subject_name(int subject);

}  // namespace geoaffect
