#pragma once

#include "geoaffect/error.hpp"
#include "geoaffect/landmarks.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

namespace geoaffect {

/// Number of unordered landmark pairs, N(N-1)/2.
constexpr Eigen::Index pair_count(Eigen::Index n_points) { return n_points * (n_points - 1) / 2; }

/// Landmark pair behind one feature column. Pairs are ordered
/// lexicographically by (i, j) with i < j.
struct PairIndex {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  Eigen::Index flat = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

inline Eigen::Index pair_to_flat(Eigen::Index i, Eigen::Index j, Eigen::Index n_points) {
  if (i < 0 || j <= i || j >= n_points) {
    fail(ErrorKind::IndexOutOfRange, "invalid landmark pair (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ") for N=" + std::to_string(n_points));
  }
  // Pairs starting at rows 0..i-1 precede row i.
  return i * (2 * n_points - i - 1) / 2 + (j - i - 1);
}

inline PairIndex flat_to_pair(Eigen::Index flat, Eigen::Index n_points) {
  if (n_points < 2 || flat < 0 || flat >= pair_count(n_points)) {
    fail(ErrorKind::IndexOutOfRange,
         "flat index " + std::to_string(flat) + " out of range for N=" + std::to_string(n_points));
  }
  Eigen::Index i = 0;
  Eigen::Index row_start = 0;
  while (flat >= row_start + (n_points - i - 1)) {
    row_start += n_points - i - 1;
    ++i;
  }
  return {i, i + 1 + (flat - row_start), flat};
}

/// Inverse of pair_count; throws ShapeMismatch when the width is not triangular.
inline Eigen::Index points_for_width(Eigen::Index width) {
  const auto n = static_cast<Eigen::Index>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * width)) / 2.0));
  if (n < 2 || pair_count(n) != width) {
    fail(ErrorKind::ShapeMismatch,
         "feature width " + std::to_string(width) + " is not N(N-1)/2 for any N");
  }
  return n;
}

/// Euclidean distances between all landmark pairs of an N x 2 point matrix,
/// in flat pair order. No normalization is applied.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> raw_pairwise_distances(
    const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(pair_count(n));
  Eigen::Index flat = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out(flat++) = (points.row(j) - points.row(i)).norm();
  }
  return out;
}

/// Feature vector of a landmark set: all pairwise distances between its
/// standardized coordinates. The set is re-standardized first, which is
/// idempotent for inputs that already are.
inline Eigen::VectorXd pairwise_distances(const LandmarkSet& lm) {
  return raw_pairwise_distances(standardize(lm).first.points);
}

}  // namespace geoaffect
