#include "geoaffect/interpret.hpp"

#include "geoaffect/error.hpp"
#include "geoaffect/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace geoaffect {

AffectOutput parse_output(std::string_view name) {
  for (size_t i = 0; i < kOutputNames.size(); ++i) {
    if (name == kOutputNames[i]) return static_cast<AffectOutput>(i);
  }
  fail(ErrorKind::Usage, "output must be one of arousal, valence, intensity; got '" + std::string(name) + "'");
}

std::string_view to_string(AffectOutput output) { return kOutputNames[static_cast<size_t>(output)]; }

EdgeLists top_weights(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Eigen::Index count) {
  const Eigen::Index width = coefficients.size();
  if (count < 1) fail(ErrorKind::Usage, "count must be positive");
  if (count > width) {
    fail(ErrorKind::CountExceedsFeatures,
         "count " + std::to_string(count) + " exceeds " + std::to_string(width) + " features");
  }
  const Eigen::Index n_points = points_for_width(width);

  std::vector<Eigen::Index> order(static_cast<size_t>(width));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(coefficients(a)) > std::abs(coefficients(b));
  });

  EdgeLists lists;
  for (Eigen::Index flat : order) {
    const double w = coefficients(flat);
    if (w == 0.0) break;
    auto& target = w > 0.0 ? lists.positive : lists.negative;
    if (static_cast<Eigen::Index>(target.size()) >= count) continue;
    const PairIndex pair = flat_to_pair(flat, n_points);
    target.push_back({pair.i, pair.j, w, static_cast<Eigen::Index>(target.size()) + 1});
  }
  return lists;
}

EdgeLists top_weights(const Regressor& regressor, AffectOutput output, Eigen::Index count) {
  const auto& b = coefficients(regressor);
  const auto column = static_cast<Eigen::Index>(output);
  if (column >= b.cols()) fail(ErrorKind::ShapeMismatch, "model has no column for " + std::string(to_string(output)));
  return top_weights(b.col(column), count);
}

Json export_edges(std::span<const WeightEdge> edges, const LandmarkSet* layout) {
  Json array = Json::array();
  for (const auto& e : edges) {
    array.push_back(Json{{"i", e.i}, {"j", e.j}, {"weight", e.weight}, {"rank", e.rank},
                         {"sign", e.weight > 0.0 ? "positive" : "negative"}});
  }
  if (!layout) return array;
  Json points = Json::array();
  for (Eigen::Index r = 0; r < layout->n_points(); ++r) points.push_back(Json::array({layout->points(r, 0), layout->points(r, 1)}));
  return Json{{"edges", std::move(array)}, {"landmarks", std::move(points)}};
}

std::vector<WeightEdge> parse_edges(const Json& doc) {
  const Json& array = doc.is_object() && doc.contains("edges") ? doc.at("edges") : doc;
  if (!array.is_array()) fail(ErrorKind::SchemaViolation, "edge list must be a JSON array");
  std::vector<WeightEdge> edges;
  try {
    for (const auto& item : array) {
      WeightEdge e{item.at("i").get<Eigen::Index>(), item.at("j").get<Eigen::Index>(), item.at("weight").get<double>(),
                   item.at("rank").get<Eigen::Index>()};
      if (e.i < 0 || e.j <= e.i) fail(ErrorKind::SchemaViolation, "edge requires 0 <= i < j");
      edges.push_back(e);
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::SchemaViolation, std::string("malformed edge: ") + e.what());
  }
  return edges;
}

}  // namespace geoaffect
