#include "support.hpp"

#include "geoaffect/landmarks.hpp"

#include <cmath>
#include <limits>

using namespace geoaffect;

namespace {

Points random_points(Eigen::Index n, std::mt19937_64& rng) {
  Points p(n, 2);
  p = oracle::gaussian(n, 2, rng);
  return p;
}

// Centroid and RMS radius recomputed with plain loops.
std::pair<Eigen::RowVector2d, double> centroid_rms(const Points& p) {
  double cx = 0.0, cy = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    cx += p(i, 0);
    cy += p(i, 1);
  }
  cx /= static_cast<double>(p.rows());
  cy /= static_cast<double>(p.rows());
  double ss = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) ss += (p(i, 0) - cx) * (p(i, 0) - cx) + (p(i, 1) - cy) * (p(i, 1) - cy);
  return {Eigen::RowVector2d(cx, cy), std::sqrt(ss / static_cast<double>(p.rows()))};
}

}  // namespace

TEST_CASE("standardize rejects coincident points") {
  Points p(3, 2);
  p << 1, 1, 1, 1, 1, 1;
  try {
    standardize(LandmarkSet(p));
    FAIL("expected DegenerateLandmarks");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateLandmarks);
  }
}

TEST_CASE("standardize leaves an already standardized set unchanged") {
  // {(-1,0),(1,0)} is below the three-point minimum; the same two points
  // listed twice have identical centroid and radius.
  Points p2(2, 2);
  p2 << -1, 0, 1, 0;
  try {
    standardize(LandmarkSet(p2));
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
  Points p3(4, 2);
  p3 << -1, 0, 1, 0, -1, 0, 1, 0;
  const auto [out, params] = standardize(LandmarkSet(p3));
  CHECK(params.centroid.norm() == doctest::Approx(0.0));
  CHECK(params.scale == doctest::Approx(1.0));
  CHECK((out.points - p3).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("standardize right triangle against recomputed centroid and radius") {
  Points p(3, 2);
  p << 0, 0, 2, 0, 0, 2;
  const auto [out, params] = standardize(LandmarkSet(p));
  CHECK(params.centroid(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(params.centroid(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto [c_in, rms_in] = centroid_rms(p);
  CHECK(params.scale == doctest::Approx(rms_in).epsilon(1e-15));
  const auto [c_out, rms_out] = centroid_rms(out.points);
  CHECK(c_out.norm() < 1e-15);
  CHECK(std::abs(rms_out - 1.0) < 1e-15);
}

TEST_CASE("unstandardize with identity params is a no-op") {
  std::mt19937_64 rng(1);
  const Points p = random_points(7, rng);
  const LandmarkSet out = unstandardize(LandmarkSet(p), StandardizationParams{});
  CHECK(out.points == p);
}

TEST_CASE("unstandardize applies scale then translation") {
  Points p(3, 2);
  p << -1, 0, 1, 0, 0, 0;
  StandardizationParams params;
  params.centroid = Eigen::RowVector2d(5, 5);
  params.scale = 2.0;
  const LandmarkSet out = unstandardize(LandmarkSet(p), params);
  Points expected(3, 2);
  expected << 3, 5, 7, 5, 5, 5;
  CHECK(out.points == expected);
}

TEST_CASE("standardize round trip on random sets") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Points p = random_points(49, rng) * 40.0;
    p.rowwise() += Eigen::RowVector2d(300.0, -120.0);
    const LandmarkSet lm(p);
    const auto [s, params] = standardize(lm);
    const LandmarkSet back = unstandardize(s, params);
    CHECK((back.points - p).cwiseAbs().maxCoeff() < 1e-12);
    const auto [c, rms] = centroid_rms(s.points);
    CHECK(c.norm() < 1e-12);
    CHECK(std::abs(rms - 1.0) < 1e-12);
  }
}

TEST_CASE("standardize is equivariant under uniform scale and translation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-500.0, 500.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Points p = random_points(49, rng);
    Points q = p * scale(rng);
    q.rowwise() += Eigen::RowVector2d(shift(rng), shift(rng));
    const auto a = standardize(LandmarkSet(p)).first;
    const auto b = standardize(LandmarkSet(q)).first;
    CHECK((a.points - b.points).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("standardize keeps metadata and landmark order") {
  Points p(3, 2);
  p << 0, 0, 4, 0, 0, 3;
  LandmarkSet lm(p);
  lm.subject_id = "S0001";
  lm.sample_id = "S0001_000";
  lm.pose = HeadPose{10, 5, 0};
  const auto [s, params] = standardize(lm);
  CHECK(s.subject_id == lm.subject_id);
  CHECK(s.sample_id == lm.sample_id);
  CHECK(s.pose == lm.pose);
  // order preserved: point 1 stays the rightmost
  CHECK(s.points(1, 0) > s.points(0, 0));
  CHECK(s.points(2, 1) > s.points(0, 1));
}

TEST_CASE("validate rejects too few points and non-finite coordinates") {
  Points two(2, 2);
  two << 0, 0, 1, 1;
  CHECK_THROWS_AS(validate(LandmarkSet(two)), Error);
  Points bad(3, 2);
  bad << 0, 0, 1, std::numeric_limits<double>::quiet_NaN(), 2, 2;
  try {
    validate(LandmarkSet(bad));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("flatten ordering is all x then all y") {
  Points p(3, 2);
  p << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd f = flatten(p);
  Eigen::VectorXd expected(6);
  expected << 1, 3, 5, 2, 4, 6;
  CHECK(f == expected);
  CHECK(unflatten(f) == p);
}

TEST_CASE("rms_distance") {
  Points a(2, 2), b(2, 2);
  a << 0, 0, 0, 0;
  b << 3, 4, 0, 0;
  CHECK(rms_distance(a, b) == doctest::Approx(std::sqrt(25.0 / 2.0)));
}
