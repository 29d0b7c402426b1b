#pragma once

#include "geoaffect/frontalization.hpp"
#include "geoaffect/linear.hpp"
#include "geoaffect/pls.hpp"
#include "geoaffect/simgen.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geoaffect {

inline constexpr std::array<std::string_view, 3> kOutputNames = {"arousal", "valence", "intensity"};
inline constexpr int kBundleFormatVersion = 1;
inline constexpr Eigen::Index kDefaultPlsComponents = 29;

using Regressor = std::variant<PlsModel<double>, LinearModel<double>>;

/// One of `pls:k`, `ridge:alpha`, `pcr:k`, `ols`.
struct MethodSpec {
  enum class Kind { Pls, Ridge, Pcr, Ols };
  Kind kind = Kind::Pls;
  Eigen::Index components = kDefaultPlsComponents;
  double alpha = 0.0;

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

MethodSpec parse_method_spec(std::string_view text);
std::string to_string(const MethodSpec& spec);
/// Table-style row label, e.g. "PLS (29)" or "Ridge (alpha=0.1)".
std::string display_name(const MethodSpec& spec);

Regressor fit_regressor(const MethodSpec& spec, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

template <typename Derived>
Eigen::MatrixXd predict(const Regressor& regressor, const Eigen::MatrixBase<Derived>& x) {
  return std::visit([&](const auto& model) -> Eigen::MatrixXd { return predict(model, x); }, regressor);
}
const Eigen::MatrixXd& coefficients(const Regressor& regressor);
Eigen::Index feature_width(const Regressor& regressor);

/// Frontalizer plus regressor: the full inference path.
struct PipelineBundle {
  FrontalizerModel frontalizer;
  Regressor regressor;
  Eigen::Index n_points = kDefaultLandmarks;
  int format_version = kBundleFormatVersion;
};

void validate(const PipelineBundle& bundle);

/// Rows are pairwise distances of frontalize(standardize(x)), re-standardized.
/// Every sample goes through the frontalizer, frontal ones included.
Eigen::MatrixXd feature_matrix(const FrontalizerModel& frontalizer, std::span<const Sample> samples);

/// n x 3 (arousal, valence, intensity). Throws SchemaViolation when a sample
/// has no label.
Eigen::MatrixXd label_matrix(std::span<const Sample> samples);

std::vector<std::string> sample_ids(std::span<const Sample> samples);

PipelineBundle train_pipeline(const FrontalizerModel& frontalizer, std::span<const Sample> samples,
                              const MethodSpec& method);

Eigen::MatrixXd predict(const PipelineBundle& bundle, std::span<const Sample> samples);

}  // namespace geoaffect
