#include "support.hpp"

#include "geoaffect/frontalization.hpp"
#include "geoaffect/simgen.hpp"

#include <algorithm>
#include <numeric>

using namespace geoaffect;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}

Points random_points(Eigen::Index n, std::mt19937_64& rng) {
  Points p(n, 2);
  p = oracle::gaussian(n, 2, rng);
  return p;
}

std::vector<FrontalPair> identity_pairs(int count, std::mt19937_64& rng) {
  std::vector<FrontalPair> pairs;
  for (int i = 0; i < count; ++i) {
    const LandmarkSet lm(random_points(49, rng));
    pairs.push_back({lm, lm});
  }
  return pairs;
}

// Posed view = landmark permutation, rotation, scale and shift of the frontal
// set. All of these commute with standardization up to the orthogonal part,
// so the standardized posed coordinates are an exact linear function of the
// standardized frontal ones.
struct PlantedMap {
  std::vector<Eigen::Index> perm;
  Eigen::Matrix2d rot;
  double scale;
  Eigen::RowVector2d shift;

  LandmarkSet operator()(const LandmarkSet& frontal) const {
    Points out(frontal.n_points(), 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out.row(i) = scale * frontal.points.row(perm[static_cast<size_t>(i)]) * rot.transpose() + shift;
    }
    return LandmarkSet(out);
  }
};

GeneratorConfig pose_config(int subjects, int samples) {
  GeneratorConfig c;
  c.n_subjects = subjects;
  c.samples_per_subject = samples;
  c.posed_copies = 1;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("identity frontalizer reduces to standardize") {
  std::mt19937_64 rng(50);
  const FrontalizerModel model = identity_frontalizer(49);
  const LandmarkSet lm(random_points(49, rng) * 3.0);
  const LandmarkSet out = frontalize(model, lm);
  CHECK((out.points - standardize(lm).first.points).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fit on identical pairs without penalty is the identity") {
  std::mt19937_64 rng(51);
  const auto pairs = identity_pairs(200, rng);
  const FrontalizerModel model = fit_frontalizer(pairs, 0.0);
  CHECK(model.weights.rows() == 99);
  CHECK(model.weights.cols() == 98);
  for (int i = 0; i < 20; ++i) {
    const LandmarkSet held_out(random_points(49, rng));
    const LandmarkSet out = frontalize(model, held_out);
    CHECK(rms_distance(out.points, standardize(held_out).first.points) < 1e-6);
  }
}

TEST_CASE("planted linear distortion is recovered") {
  std::mt19937_64 rng(52);
  PlantedMap map;
  map.perm.resize(49);
  std::iota(map.perm.begin(), map.perm.end(), Eigen::Index{0});
  std::shuffle(map.perm.begin(), map.perm.end(), rng);
  const double th = 0.7;
  map.rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  map.scale = 2.5;
  map.shift = Eigen::RowVector2d(4.0, -1.0);

  std::vector<FrontalPair> pairs;
  for (int i = 0; i < 200; ++i) {
    const LandmarkSet frontal(random_points(49, rng));
    pairs.push_back({map(frontal), frontal});
  }
  const FrontalizerModel model = fit_frontalizer(pairs, 0.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const LandmarkSet frontal(random_points(49, rng));
    worst = std::max(worst, rms_distance(frontalize(model, map(frontal)).points, standardize(frontal).first.points));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("simulated head poses are frontalized within tolerance") {
  const Dataset data = gen_dataset(pose_config(600, 2));
  std::vector<FrontalPair> train, held_out;
  for (size_t i = 0; i < data.posed.size(); ++i) {
    const FrontalPair pair{data.posed[i].landmarks, data.posed_truth[i]};
    (i < 1000 ? train : held_out).push_back(pair);  // subjects 0..499 train
  }
  const FrontalizerModel model = fit_frontalizer(train);
  CHECK(model.max_abs_yaw <= 45.0);
  CHECK(model.max_abs_yaw > 40.0);
  CHECK(model.max_abs_pitch <= 15.0);
  double sum_sq = 0.0;
  double pass_sq = 0.0;
  for (const auto& pair : held_out) {
    const Points truth = standardize(pair.frontal).first.points;
    const double e = rms_distance(frontalize(model, pair.posed).points, truth);
    sum_sq += e * e;
    const double f = rms_distance(frontalize(model, pair.frontal).points, truth);
    pass_sq += f * f;
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(held_out.size()));
  const double pass = std::sqrt(pass_sq / static_cast<double>(held_out.size()));
  MESSAGE("held-out frontalization RMS " << rms << ", frontal pass-through RMS " << pass);
  CHECK(rms <= 0.05);
  CHECK(pass <= 0.05);

  SUBCASE("single face at 30 degrees yaw") {
    GeneratorConfig c = pose_config(1, 1);
    c.noise_std = 0.0;
    auto rng = subject_stream(99, 0, 1);
    const SubjectParams subject = sample_subject(c, rng);
    const Points3 face = synth_face_3d(affect_from_polar(120.0, 0.8), subject, c, rng);
    const LandmarkSet posed = rotate_project(face, 30.0, 0.0, 0.0);
    const Points truth = standardize(rotate_project(face, 0.0, 0.0, 0.0)).first.points;
    CHECK(rms_distance(frontalize(model, posed).points, truth) <= 0.05);
  }
}

TEST_CASE("the map is affine on flattened coordinates") {
  std::mt19937_64 rng(53);
  const FrontalizerModel model = fit_frontalizer(identity_pairs(150, rng), 1e-2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(98);
  const Eigen::VectorXd bias = apply_affine(model, zero);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = oracle::gaussian(98, 1, rng), v = oracle::gaussian(98, 1, rng);
    const double a = 0.3 * trial - 1.0, b = 1.7;
    const Eigen::VectorXd lhs = apply_affine(model, a * u + b * v) - bias;
    const Eigen::VectorXd rhs = a * (apply_affine(model, u) - bias) + b * (apply_affine(model, v) - bias);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("optimum objective on a subset never exceeds the superset model's") {
  const Dataset data = gen_dataset(pose_config(150, 2));
  const auto pairs = frontal_pairs(data);
  for (double lambda : {0.0, 1e-3, 1e-1}) {
    const std::span<const FrontalPair> all(pairs);
    const auto subset = all.first(200);
    const FrontalizerModel small = fit_frontalizer(subset, lambda);
    const FrontalizerModel big = fit_frontalizer(all, lambda);
    CHECK(fit_objective(small, subset) <= fit_objective(big, subset) * (1 + 1e-12));
    CHECK(fit_objective(big, all) <= fit_objective(small, all) * (1 + 1e-12));
  }
}

TEST_CASE("ridge penalty leaves the bias unpenalized") {
  std::mt19937_64 rng(54);
  // Under a heavy penalty the weights vanish and the bias alone carries the
  // mean standardized target.
  std::vector<FrontalPair> pairs;
  for (int i = 0; i < 100; ++i) {
    const LandmarkSet lm(random_points(6, rng));
    pairs.push_back({lm, lm});
  }
  const FrontalizerModel model = fit_frontalizer(pairs, 1e6);
  CHECK(model.weights.topRows(12).cwiseAbs().maxCoeff() < 1e-3);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(12);
  for (const auto& p : pairs) mean += flatten(standardize(p.frontal).first.points);
  mean /= static_cast<double>(pairs.size());
  CHECK((model.weights.row(12).transpose() - mean).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("frontalizer errors") {
  std::mt19937_64 rng(55);
  auto pairs = identity_pairs(10, rng);
  // 10 pairs cannot determine 97 unknowns per output without a penalty
  CHECK(kind_of([&] { fit_frontalizer(pairs, 0.0); }) == ErrorKind::SingularSystem);
  CHECK_NOTHROW(fit_frontalizer(pairs, 1e-3));
  pairs.push_back({LandmarkSet(random_points(48, rng)), LandmarkSet(random_points(48, rng))});
  CHECK(kind_of([&] { fit_frontalizer(pairs, 1e-3); }) == ErrorKind::ShapeMismatch);
  pairs.back() = {LandmarkSet(random_points(49, rng)), LandmarkSet(random_points(48, rng))};
  CHECK(kind_of([&] { fit_frontalizer(pairs, 1e-3); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { fit_frontalizer(std::vector<FrontalPair>{}, 1e-3); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { fit_frontalizer(identity_pairs(5, rng), -1.0); }) == ErrorKind::ConfigInvalid);
  const FrontalizerModel model = identity_frontalizer(49);
  CHECK(kind_of([&] { frontalize(model, LandmarkSet(random_points(30, rng))); }) == ErrorKind::ShapeMismatch);
  FrontalizerModel broken = model;
  broken.weights.conservativeResize(98, 98);
  CHECK(kind_of([&] { validate(broken); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("frontalize is deterministic and clears pose") {
  std::mt19937_64 rng(56);
  const FrontalizerModel model = fit_frontalizer(identity_pairs(120, rng), 1e-3);
  LandmarkSet lm(random_points(49, rng));
  lm.pose = HeadPose{20, 5, 0};
  lm.sample_id = "x";
  const LandmarkSet a = frontalize(model, lm), b = frontalize(model, lm);
  CHECK(a.points == b.points);
  CHECK_FALSE(a.pose.has_value());
  CHECK(a.sample_id == lm.sample_id);
}
