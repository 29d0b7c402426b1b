#include "geoaffect/simgen.hpp"

#include "geoaffect/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace geoaffect {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Hand-authored face in loose units: x to the image right, y up, z towards
// the viewer.
constexpr std::array<std::array<double, 3>, 49> kRawTemplate = {{
    // eyebrows
    {-0.95, 0.55, 0.05}, {-0.78, 0.66, 0.12}, {-0.58, 0.70, 0.17}, {-0.38, 0.67, 0.20}, {-0.20, 0.60, 0.22},
    {0.20, 0.60, 0.22}, {0.38, 0.67, 0.20}, {0.58, 0.70, 0.17}, {0.78, 0.66, 0.12}, {0.95, 0.55, 0.05},
    // nose bridge
    {0.0, 0.42, 0.30}, {0.0, 0.28, 0.40}, {0.0, 0.14, 0.50}, {0.0, 0.00, 0.60},
    // nostrils
    {-0.20, -0.12, 0.38}, {-0.10, -0.15, 0.45}, {0.0, -0.17, 0.50}, {0.10, -0.15, 0.45}, {0.20, -0.12, 0.38},
    // image-left eye: outer corner, upper lid x2, inner corner, lower lid x2
    {-0.72, 0.38, 0.10}, {-0.60, 0.45, 0.15}, {-0.45, 0.45, 0.16}, {-0.32, 0.37, 0.15}, {-0.45, 0.31, 0.15}, {-0.60, 0.31, 0.14},
    // image-right eye: inner corner, upper lid x2, outer corner, lower lid x2
    {0.32, 0.37, 0.15}, {0.45, 0.45, 0.16}, {0.60, 0.45, 0.15}, {0.72, 0.38, 0.10}, {0.60, 0.31, 0.14}, {0.45, 0.31, 0.15},
    // outer lips: left corner, upper lip, right corner, lower lip
    {-0.42, -0.52, 0.22}, {-0.28, -0.44, 0.30}, {-0.12, -0.40, 0.35}, {0.0, -0.42, 0.36}, {0.12, -0.40, 0.35}, {0.28, -0.44, 0.30},
    {0.42, -0.52, 0.22}, {0.28, -0.62, 0.29}, {0.13, -0.67, 0.33}, {0.0, -0.68, 0.34}, {-0.13, -0.67, 0.33}, {-0.28, -0.62, 0.29},
    // inner lips: left corner, upper x2, right corner, lower x2
    {-0.30, -0.52, 0.26}, {-0.12, -0.49, 0.32}, {0.12, -0.49, 0.32}, {0.30, -0.52, 0.26}, {0.12, -0.56, 0.32}, {-0.12, -0.56, 0.32},
}};

struct Displacement {
  int index;
  double dx, dy, dz;
};

Points3 from_displacements(std::initializer_list<Displacement> items) {
  Points3 out = Points3::Zero(49, 3);
  for (const auto& d : items) out.row(d.index) += Eigen::RowVector3d(d.dx, d.dy, d.dz);
  return out;
}

struct Geometry {
  double scale = 1.0;
  Eigen::RowVector3d centroid = Eigen::RowVector3d::Zero();
  Points3 neutral;
  Points3 arousal;
  Points3 valence;
  Points3 cross;
  std::vector<Points3> identity;
};

const Geometry& geometry() {
  static const Geometry g = [] {
    Geometry out;
    Points3 raw(49, 3);
    for (int i = 0; i < 49; ++i) raw.row(i) = Eigen::RowVector3d(kRawTemplate[i][0], kRawTemplate[i][1], kRawTemplate[i][2]);
    out.centroid = raw.colwise().mean();
    const Points3 centered = raw.rowwise() - out.centroid;
    out.scale = 1.0 / std::sqrt(centered.leftCols(2).squaredNorm() / 49.0);
    out.neutral = centered * out.scale;

    out.arousal = from_displacements({
                      {0, 0.0, 0.05, 0.0}, {1, 0.0, 0.06, 0.0}, {2, 0.0, 0.08, 0.0}, {3, 0.0, 0.10, 0.0}, {4, 0.0, 0.11, 0.0},
                      {5, 0.0, 0.11, 0.0}, {6, 0.0, 0.10, 0.0}, {7, 0.0, 0.08, 0.0}, {8, 0.0, 0.06, 0.0}, {9, 0.0, 0.05, 0.0},
                      {20, 0.0, 0.04, 0.0}, {21, 0.0, 0.04, 0.0}, {26, 0.0, 0.04, 0.0}, {27, 0.0, 0.04, 0.0},
                      {23, 0.0, -0.02, 0.0}, {24, 0.0, -0.02, 0.0}, {29, 0.0, -0.02, 0.0}, {30, 0.0, -0.02, 0.0},
                      {38, 0.0, -0.04, 0.0}, {39, 0.0, -0.05, 0.0}, {40, 0.0, -0.05, 0.0}, {41, 0.0, -0.05, 0.0}, {42, 0.0, -0.04, 0.0},
                      {47, 0.0, -0.04, 0.0}, {48, 0.0, -0.04, 0.0},
                  }) * out.scale;

    out.valence = from_displacements({
                      {31, -0.12, 0.05, -0.02}, {37, 0.12, 0.05, -0.02},
                      {4, -0.02, 0.0, 0.0}, {5, 0.02, 0.0, 0.0},
                      {23, 0.0, 0.02, 0.0}, {24, 0.0, 0.02, 0.0}, {29, 0.0, 0.02, 0.0}, {30, 0.0, 0.02, 0.0},
                  }) * out.scale;

    out.cross = from_displacements({
                    {39, 0.0, -0.06, 0.0}, {40, 0.0, -0.07, 0.0}, {41, 0.0, -0.06, 0.0},
                    {47, 0.0, -0.05, 0.0}, {48, 0.0, -0.05, 0.0},
                    {33, 0.0, 0.02, 0.0}, {34, 0.0, 0.02, 0.0}, {35, 0.0, 0.02, 0.0},
                }) * out.scale;

    // Identity: face width, eye spacing, brow height, nose length, mouth
    // width, lower-face length, facial depth.
    Points3 width = Points3::Zero(49, 3);
    width.col(0) = 0.08 * out.neutral.col(0);
    Points3 eyes = Points3::Zero(49, 3);
    for (int i = 0; i <= 30; ++i) {
      if (i >= 10 && i <= 18) continue;
      eyes(i, 0) = (out.neutral(i, 0) < 0.0 ? -0.04 : 0.04) * out.scale;
    }
    Points3 brows = Points3::Zero(49, 3);
    for (int i = 0; i < 10; ++i) brows(i, 1) = 0.04 * out.scale;
    Points3 nose = Points3::Zero(49, 3);
    for (int i = 12; i <= 18; ++i) nose(i, 1) = (i >= 14 ? -0.04 : -0.02) * out.scale;
    Points3 mouth_width = Points3::Zero(49, 3);
    for (int i = 31; i < 49; ++i) mouth_width(i, 0) = 0.08 * out.neutral(i, 0);
    Points3 lower = Points3::Zero(49, 3);
    for (int i = 31; i < 49; ++i) lower(i, 1) = -0.04 * out.scale;
    Points3 depth = Points3::Zero(49, 3);
    depth.col(2) = 0.15 * out.neutral.col(2);
    out.identity = {width, eyes, brows, nose, mouth_width, lower, depth};
    return out;
  }();
  return g;
}

Eigen::VectorXd projected_flat(const Points3& field) { return flatten(Points(field.leftCols(2))); }

struct ModeNorms {
  double sigma_max;
  double sigma_min;
  double cross_norm;
};

ModeNorms mode_norms() {
  const auto& g = geometry();
  Eigen::MatrixXd modes(2 * 49, 2);
  modes.col(0) = projected_flat(g.arousal);
  modes.col(1) = projected_flat(g.valence);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(modes);
  return {svd.singularValues()(0), svd.singularValues()(1), projected_flat(g.cross).norm()};
}

void check_finite_nonneg(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    fail(ErrorKind::ConfigInvalid, std::string(name) + " must be finite and non-negative");
  }
}

}  // namespace

AffectLabel affect_from_polar(double angle_deg, double radius) {
  const double theta = angle_deg * kDeg;
  return {radius * std::sin(theta), radius * std::cos(theta), radius};
}

void validate(const AffectLabel& label) {
  const bool in_range = std::abs(label.arousal) <= 1.0 && std::abs(label.valence) <= 1.0 &&
                        label.intensity >= 0.0 && label.intensity <= 1.0;
  if (!in_range || std::abs(std::hypot(label.arousal, label.valence) - label.intensity) > 1e-9) {
    fail(ErrorKind::ConfigInvalid, "affect label outside the unit disc or inconsistent intensity");
  }
}

AffectLabel sample_affect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double angle = 360.0 * unit(rng);
  const double radius = std::sqrt(unit(rng));
  return affect_from_polar(angle, radius);
}

void validate(const GeneratorConfig& config) {
  if (config.n_subjects < 1) fail(ErrorKind::ConfigInvalid, "n_subjects must be >= 1");
  if (config.samples_per_subject < 1) fail(ErrorKind::ConfigInvalid, "samples_per_subject must be >= 1");
  if (config.posed_copies < 0) fail(ErrorKind::ConfigInvalid, "posed_copies must be >= 0");
  check_finite_nonneg(config.identity_variance, "identity_variance");
  check_finite_nonneg(config.nonlinearity_gain, "nonlinearity_gain");
  check_finite_nonneg(config.noise_std, "noise_std");
  if (!std::isfinite(config.expression_gain) || config.expression_gain <= 0.0) {
    fail(ErrorKind::ConfigInvalid, "expression_gain must be finite and positive");
  }
  const auto& p = config.pose_ranges;
  for (double limit : {p.yaw_max, p.pitch_max, p.roll_max}) {
    if (!std::isfinite(limit) || limit < 0.0 || limit > 90.0) {
      fail(ErrorKind::ConfigInvalid, "pose ranges must lie in [0, 90] degrees");
    }
  }
}

const Points3& neutral_template() { return geometry().neutral; }
const Points3& arousal_mode() { return geometry().arousal; }
const Points3& valence_mode() { return geometry().valence; }
const Points3& cross_mode() { return geometry().cross; }
const std::vector<Points3>& identity_modes() { return geometry().identity; }

std::mt19937_64 subject_stream(std::uint64_t seed, std::uint64_t subject, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(subject), static_cast<std::uint32_t>(subject >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

SubjectParams sample_subject(const GeneratorConfig& config, std::mt19937_64& rng) {
  std::normal_distribution<double> coefficient(0.0, std::sqrt(config.identity_variance));
  SubjectParams subject;
  subject.identity_offset = Points3::Zero(49, 3);
  for (const auto& mode : identity_modes()) {
    const double c = config.identity_variance > 0.0 ? coefficient(rng) : 0.0;
    subject.identity_offset += c * mode;
  }
  return subject;
}

Points3 synth_face_3d(const AffectLabel& label, const SubjectParams& subject,
                      const GeneratorConfig& config, std::mt19937_64& rng) {
  validate(label);
  if (subject.identity_offset.rows() != 49) fail(ErrorKind::ConfigInvalid, "identity offset must be 49 x 3");
  const auto& g = geometry();
  Points3 face = g.neutral + subject.identity_offset +
                 config.expression_gain * (label.arousal * g.arousal + label.valence * g.valence) +
                 (config.nonlinearity_gain * label.arousal * label.valence) * g.cross;
  if (config.noise_std > 0.0) {
    std::normal_distribution<double> jitter(0.0, config.noise_std);
    for (Eigen::Index i = 0; i < face.rows(); ++i) {
      for (Eigen::Index c = 0; c < 3; ++c) face(i, c) += jitter(rng);
    }
  }
  return face;
}

LandmarkSet synth_face(const AffectLabel& label, const SubjectParams& subject,
                       const GeneratorConfig& config, std::mt19937_64& rng) {
  return rotate_project(synth_face_3d(label, subject, config, rng), 0.0, 0.0, 0.0);
}

Eigen::Matrix3d rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg) {
  const Eigen::Matrix3d yaw = Eigen::AngleAxisd(yaw_deg * kDeg, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d pitch = Eigen::AngleAxisd(pitch_deg * kDeg, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d roll = Eigen::AngleAxisd(roll_deg * kDeg, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return yaw * pitch * roll;
}

LandmarkSet rotate_project(const Points3& face, double yaw_deg, double pitch_deg, double roll_deg) {
  const Points3 rotated = face * rotation_matrix(yaw_deg, pitch_deg, roll_deg).transpose();
  LandmarkSet out{Points(rotated.leftCols(2))};
  out.pose = HeadPose{yaw_deg, pitch_deg, roll_deg};
  return out;
}

double lipschitz_bound(const GeneratorConfig& config) {
  const auto norms = mode_norms();
  return (config.expression_gain * norms.sigma_max + std::sqrt(2.0) * config.nonlinearity_gain * norms.cross_norm) /
         std::sqrt(49.0);
}

double injectivity_floor(const GeneratorConfig& config) {
  const auto norms = mode_norms();
  return (config.expression_gain * norms.sigma_min - std::sqrt(2.0) * config.nonlinearity_gain * norms.cross_norm) /
         std::sqrt(49.0);
}

std::string subject_name(int subject) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%04d", subject);
  return buf;
}

Dataset gen_dataset(const GeneratorConfig& config) {
  validate(config);
  enum : std::uint64_t { kIdentity = 1, kSamples = 2, kPoses = 3 };
  Dataset out;
  out.frontal.reserve(static_cast<size_t>(config.n_subjects) * static_cast<size_t>(config.samples_per_subject));
  const auto& ranges = config.pose_ranges;

  for (int s = 0; s < config.n_subjects; ++s) {
    auto identity_rng = subject_stream(config.seed, static_cast<std::uint64_t>(s), kIdentity);
    auto sample_rng = subject_stream(config.seed, static_cast<std::uint64_t>(s), kSamples);
    auto pose_rng = subject_stream(config.seed, static_cast<std::uint64_t>(s), kPoses);
    const SubjectParams subject = sample_subject(config, identity_rng);
    const std::string subject_id = subject_name(s);

    for (int j = 0; j < config.samples_per_subject; ++j) {
      const AffectLabel label = sample_affect(sample_rng);
      const Points3 face = synth_face_3d(label, subject, config, sample_rng);
      char sample_buf[48];
      std::snprintf(sample_buf, sizeof sample_buf, "%s_%03d", subject_id.c_str(), j);

      Sample frontal{rotate_project(face, 0.0, 0.0, 0.0), label};
      frontal.landmarks.subject_id = subject_id;
      frontal.landmarks.sample_id = sample_buf;
      out.frontal.push_back(frontal);

      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (int c = 0; c < config.posed_copies; ++c) {
        const double yaw = ranges.yaw_max * unit(pose_rng);
        const double pitch = ranges.pitch_max * unit(pose_rng);
        const double roll = ranges.roll_max * unit(pose_rng);
        Sample posed{rotate_project(face, yaw, pitch, roll), label};
        posed.landmarks.subject_id = subject_id;
        char posed_buf[64];
        std::snprintf(posed_buf, sizeof posed_buf, "%s_p%02d", sample_buf, c);
        posed.landmarks.sample_id = posed_buf;
        out.posed.push_back(std::move(posed));
        out.posed_truth.push_back(frontal.landmarks);
      }
    }
  }
  return out;
}

std::vector<FrontalPair> frontal_pairs(const Dataset& dataset) {
  std::vector<FrontalPair> pairs;
  pairs.reserve(dataset.posed.size());
  for (size_t i = 0; i < dataset.posed.size(); ++i) pairs.push_back({dataset.posed[i].landmarks, dataset.posed_truth[i]});
  return pairs;
}

}  // namespace geoaffect
