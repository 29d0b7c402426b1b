#pragma once

#include "geoaffect/landmarks.hpp"
#include "geoaffect/pipeline.hpp"
#include "geoaffect/serialize.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geoaffect {

enum class AffectOutput { Arousal = 0, Valence = 1, Intensity = 2 };

AffectOutput parse_output(std::string_view name);
std::string_view to_string(AffectOutput output);

/// A landmark-pair distance with its signed coefficient for one output.
/// A positive weight means lengthening that distance raises the prediction.
struct WeightEdge {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double weight = 0.0;
  Eigen::Index rank = 0;  // 1-based, by |weight| within its list

  friend bool operator==(const WeightEdge&, const WeightEdge&) = default;
};

struct EdgeLists {
  std::vector<WeightEdge> positive;
  std::vector<WeightEdge> negative;
};

/// The `count` largest positive and `count` most negative entries of one
/// coefficient column, each list ranked by magnitude with ties going to the
/// lower flat index. Zero coefficients never appear.
/// Throws CountExceedsFeatures when count exceeds the column length and
/// ShapeMismatch when the length is not N(N-1)/2.
EdgeLists top_weights(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Eigen::Index count);
EdgeLists top_weights(const Regressor& regressor, AffectOutput output, Eigen::Index count);

/// Bare array of {i, j, weight, rank, sign}; with a layout the array goes
/// under "edges" next to the reference "landmarks" coordinates.
Json export_edges(std::span<const WeightEdge> edges, const LandmarkSet* layout = nullptr);
std::vector<WeightEdge> parse_edges(const Json& doc);

}  // namespace geoaffect
