#include "support.hpp"

#include "geoaffect/features.hpp"
#include "geoaffect/linear.hpp"
#include "geoaffect/simgen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

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

GeneratorConfig small_config(int subjects, int samples) {
  GeneratorConfig c;
  c.n_subjects = subjects;
  c.samples_per_subject = samples;
  return c;
}

SubjectParams neutral_subject() { return {Points3::Zero(49, 3)}; }

double av_distance(const AffectLabel& a, const AffectLabel& b) {
  return std::hypot(a.arousal - b.arousal, a.valence - b.valence);
}

// Flattened raw frontal coordinates and (arousal, valence) targets.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> coordinate_problem(std::span<const Sample> samples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), 98), y(static_cast<Eigen::Index>(samples.size()), 2);
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r) = flatten(samples[i].landmarks.points).transpose();
    y(r, 0) = samples[i].label->arousal;
    y(r, 1) = samples[i].label->valence;
  }
  return {x, y};
}

}  // namespace

TEST_CASE("polar labels") {
  const AffectLabel neutral = affect_from_polar(123.0, 0.0);
  CHECK(neutral.arousal == 0.0);
  CHECK(neutral.valence == 0.0);
  CHECK(neutral.intensity == 0.0);
  const AffectLabel edge = affect_from_polar(0.0, 1.0);
  CHECK(std::hypot(edge.arousal, edge.valence) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(edge.intensity == 1.0);
  CHECK(edge.valence == doctest::Approx(1.0));
  const AffectLabel up = affect_from_polar(90.0, 0.5);
  CHECK(up.arousal == doctest::Approx(0.5));
  CHECK(std::abs(up.valence) < 1e-15);
}

TEST_CASE("label validation") {
  CHECK_NOTHROW(validate(affect_from_polar(200.0, 0.7)));
  CHECK(kind_of([] { validate(AffectLabel{0.6, 0.6, 0.5}); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { validate(AffectLabel{1.2, 0.0, 1.2}); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { validate(AffectLabel{std::nan(""), 0.0, 0.0}); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("area-uniform disc sampling") {
  std::mt19937_64 rng(60);
  double sum = 0.0;
  int inner = 0;
  int upper = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const AffectLabel l = sample_affect(rng);
    CHECK_MESSAGE(std::abs(l.intensity - std::hypot(l.arousal, l.valence)) <= 1e-9, "intensity invariant");
    REQUIRE(l.intensity <= 1.0);
    sum += l.intensity;
    inner += l.intensity < 0.5 ? 1 : 0;
    upper += l.arousal > 0.0 ? 1 : 0;
  }
  // E[r] = 2/3; P(r < 1/2) = 1/4 for an area-uniform disc
  CHECK(std::abs(sum / n - 2.0 / 3.0) < 0.01);
  CHECK(std::abs(static_cast<double>(inner) / n - 0.25) < 0.01);
  CHECK(std::abs(static_cast<double>(upper) / n - 0.5) < 0.01);
}

TEST_CASE("neutral label without identity or noise is the template projection") {
  GeneratorConfig c = small_config(1, 1);
  c.noise_std = 0.0;
  std::mt19937_64 rng(61);
  const LandmarkSet face = synth_face(affect_from_polar(0.0, 0.0), neutral_subject(), c, rng);
  const Points expected = neutral_template().leftCols(2);
  CHECK(face.points == expected);
  // the template's frontal projection is standardized
  const auto [s, params] = standardize(face);
  CHECK(params.centroid.norm() < 1e-12);
  CHECK(std::abs(params.scale - 1.0) < 1e-12);
}

TEST_CASE("modes are fixed 49-point fields") {
  CHECK(neutral_template().rows() == 49);
  CHECK(arousal_mode().rows() == 49);
  CHECK(valence_mode().rows() == 49);
  CHECK(cross_mode().rows() == 49);
  CHECK(identity_modes().size() == 7);
  // the template has depth variation (needed for pose effects)
  CHECK(neutral_template().col(2).cwiseAbs().maxCoeff() > 0.1);
  // the valence mode moves the mouth corners apart horizontally
  const double spread = valence_mode()(kMouthCornerRight, 0) - valence_mode()(kMouthCornerLeft, 0);
  const double corner_gap = neutral_template()(kMouthCornerRight, 0) - neutral_template()(kMouthCornerLeft, 0);
  CHECK(spread * corner_gap > 0.0);
}

TEST_CASE("continuity and injectivity probes") {
  GeneratorConfig c = small_config(1, 1);
  c.noise_std = 0.0;
  const double lip = lipschitz_bound(c);
  const double floor = injectivity_floor(c);
  MESSAGE("Lipschitz bound " << lip << ", injectivity floor " << floor);
  CHECK(floor > 0.0);
  CHECK(floor < lip);

  std::mt19937_64 rng(62);
  int checked = 0;
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (int subject_index = 0; subject_index < 5; ++subject_index) {
    auto id_rng = subject_stream(5, static_cast<std::uint64_t>(subject_index), 1);
    const SubjectParams subject = sample_subject(c, id_rng);
    for (int accepted = 0; accepted < 2000;) {
      const AffectLabel a = sample_affect(rng), b = sample_affect(rng);
      const double d = av_distance(a, b);
      if (d < 0.05) continue;
      ++accepted;
      const double rms = rms_distance(synth_face(a, subject, c, rng).points, synth_face(b, subject, c, rng).points);
      min_ratio = std::min(min_ratio, rms / d);
      max_ratio = std::max(max_ratio, rms / d);
      ++checked;
    }
  }
  MESSAGE(checked << " pairs, RMS/distance in [" << min_ratio << ", " << max_ratio << "]");
  CHECK(checked == 10000);
  CHECK(max_ratio <= lip);
  CHECK(min_ratio >= floor);
}

TEST_CASE("same stream gives bit-identical faces") {
  GeneratorConfig c = small_config(1, 1);
  auto r1 = subject_stream(3, 4, 2), r2 = subject_stream(3, 4, 2);
  auto i1 = subject_stream(3, 4, 1), i2 = subject_stream(3, 4, 1);
  const SubjectParams s1 = sample_subject(c, i1), s2 = sample_subject(c, i2);
  const AffectLabel label = affect_from_polar(45.0, 0.6);
  CHECK(synth_face(label, s1, c, r1).points == synth_face(label, s2, c, r2).points);
  auto other = subject_stream(3, 5, 2);
  auto r3 = subject_stream(3, 4, 2);
  CHECK(synth_face(label, s1, c, other).points != synth_face(label, s1, c, r3).points);
}

TEST_CASE("rotation and projection") {
  const Points3& face = neutral_template();
  SUBCASE("zero angles leave the frontal view unchanged") {
    const LandmarkSet lm = rotate_project(face, 0, 0, 0);
    CHECK(lm.points == Points(face.leftCols(2)));
    REQUIRE(lm.pose.has_value());
    CHECK(lm.pose->yaw == 0.0);
  }
  SUBCASE("single point trigonometry") {
    Points3 p(1, 3);
    p << 0.3, -0.2, 0.7;
    const LandmarkSet yaw90 = rotate_project(p, 90, 0, 0);
    CHECK(yaw90.points(0, 0) == doctest::Approx(0.7).epsilon(1e-12));  // depth becomes x
    CHECK(yaw90.points(0, 1) == doctest::Approx(-0.2).epsilon(1e-12));
    const double th = 30.0 * std::numbers::pi / 180.0;
    const LandmarkSet yaw30 = rotate_project(p, 30, 0, 0);
    CHECK(yaw30.points(0, 0) == doctest::Approx(0.3 * std::cos(th) + 0.7 * std::sin(th)).epsilon(1e-12));
    // pitch about x: y' = y cos - z sin
    const LandmarkSet pitch20 = rotate_project(p, 0, 20, 0);
    const double ph = 20.0 * std::numbers::pi / 180.0;
    CHECK(pitch20.points(0, 1) == doctest::Approx(-0.2 * std::cos(ph) - 0.7 * std::sin(ph)).epsilon(1e-12));
    CHECK(pitch20.points(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
    // roll about z: in-plane rotation
    const LandmarkSet roll90 = rotate_project(p, 0, 0, 90);
    CHECK(roll90.points(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(roll90.points(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("rotation is an isometry and projection contracts") {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> ang(-90.0, 90.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double y = ang(rng), p = ang(rng), r = ang(rng);
      const Eigen::Matrix3d rot = rotation_matrix(y, p, r);
      CHECK((rot * rot.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(rot.determinant() == doctest::Approx(1.0));
      const Points3 rotated = face * rot.transpose();
      const LandmarkSet proj = rotate_project(face, y, p, r);
      for (Eigen::Index i = 0; i < 49; i += 3) {
        for (Eigen::Index j = i + 1; j < 49; j += 5) {
          const double d3 = (face.row(i) - face.row(j)).norm();
          CHECK(std::abs((rotated.row(i) - rotated.row(j)).norm() - d3) < 1e-12);
          CHECK((proj.points.row(i) - proj.points.row(j)).norm() <= d3 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("dataset counts and ids") {
  const Dataset one = gen_dataset(small_config(1, 1));
  CHECK(one.frontal.size() == 1);
  CHECK(one.posed.empty());

  const Dataset data = gen_dataset(GeneratorConfig{});
  CHECK(data.frontal.size() == 6000);
  std::set<std::string> subjects, samples;
  for (const auto& s : data.frontal) {
    subjects.insert(*s.landmarks.subject_id);
    samples.insert(*s.landmarks.sample_id);
    REQUIRE(s.label.has_value());
    CHECK_MESSAGE(std::abs(s.label->intensity - std::hypot(s.label->arousal, s.label->valence)) <= 1e-9,
                  "label invariant");
  }
  CHECK(subjects.size() == 250);
  CHECK(samples.size() == 6000);
  CHECK(*data.frontal.front().landmarks.subject_id == "S0000");
  CHECK(*data.frontal.front().landmarks.sample_id == "S0000_000");
}

TEST_CASE("posed copies carry their frontal truth") {
  GeneratorConfig c = small_config(4, 3);
  c.posed_copies = 2;
  c.noise_std = 0.0;
  const Dataset data = gen_dataset(c);
  REQUIRE(data.posed.size() == 24);
  REQUIRE(data.posed_truth.size() == 24);
  CHECK(*data.posed[0].landmarks.sample_id == "S0000_000_p00");
  CHECK(*data.posed[1].landmarks.sample_id == "S0000_000_p01");
  for (size_t i = 0; i < data.posed.size(); ++i) {
    const auto& pose = *data.posed[i].landmarks.pose;
    CHECK(std::abs(pose.yaw) <= 45.0);
    CHECK(std::abs(pose.pitch) <= 15.0);
    CHECK(pose.roll == 0.0);
    CHECK(data.posed_truth[i].points == data.frontal[i / 2].landmarks.points);
  }
  CHECK(frontal_pairs(data).size() == 24);
}

TEST_CASE("subject substreams make generation order independent") {
  const Dataset small = gen_dataset(small_config(3, 5));
  const Dataset large = gen_dataset(small_config(8, 5));
  for (size_t i = 0; i < small.frontal.size(); ++i) {
    CHECK(small.frontal[i].landmarks.points == large.frontal[i].landmarks.points);
    CHECK(*small.frontal[i].label == *large.frontal[i].label);
  }
  GeneratorConfig other = small_config(3, 5);
  other.seed = 1;
  CHECK(gen_dataset(other).frontal[0].landmarks.points != small.frontal[0].landmarks.points);
}

TEST_CASE("config validation") {
  auto with = [](auto&& edit) {
    GeneratorConfig c;
    edit(c);
    return kind_of([&] { gen_dataset(c); });
  };
  CHECK(with([](GeneratorConfig& c) { c.n_subjects = 0; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.samples_per_subject = 0; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.identity_variance = -1.0; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.expression_gain = 0.0; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.nonlinearity_gain = -0.1; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.noise_std = std::nan(""); }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.pose_ranges.yaw_max = 95.0; }) == ErrorKind::ConfigInvalid);
  CHECK(with([](GeneratorConfig& c) { c.posed_copies = -1; }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("noise-free linear generator is recovered exactly by PLS on coordinates") {
  GeneratorConfig c = small_config(40, 10);
  c.noise_std = 0.0;
  c.nonlinearity_gain = 0.0;
  const Dataset data = gen_dataset(c);
  const std::span<const Sample> all(data.frontal);
  const auto [x_train, y_train] = coordinate_problem(all.first(300));
  const auto [x_val, y_val] = coordinate_problem(all.subspan(300));  // 10 unseen subjects

  // Latent dimension of the frontal view: the affect modes plus the identity
  // modes that move x or y (a depth-only mode is invisible frontally).
  std::vector<Points3> modes{arousal_mode(), valence_mode()};
  modes.insert(modes.end(), identity_modes().begin(), identity_modes().end());
  Eigen::MatrixXd projected(98, static_cast<Eigen::Index>(modes.size()));
  for (size_t i = 0; i < modes.size(); ++i) {
    projected.col(static_cast<Eigen::Index>(i)) = flatten(Points(modes[i].leftCols(2)));
  }
  const Eigen::Index latent = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(projected).rank();
  CHECK(latent == 8);
  const auto model = testing::pls(x_train, y_train, latent);
  const Eigen::VectorXd val = mse(y_val, predict(model, x_val));
  MESSAGE("validation MSE at k=" << latent << ": " << val.transpose());
  CHECK(val.maxCoeff() < 1e-8);
  const auto short_model = testing::pls(x_train, y_train, 3);
  CHECK(mse(y_val, predict(short_model, x_val)).maxCoeff() > 1e-6);

  SUBCASE("without identity variation two components suffice") {
    GeneratorConfig flat = c;
    flat.identity_variance = 0.0;
    const Dataset d = gen_dataset(flat);
    const std::span<const Sample> s(d.frontal);
    const auto [xt, yt] = coordinate_problem(s.first(300));
    const auto [xv, yv] = coordinate_problem(s.subspan(300));
    CHECK(mse(yv, predict(testing::pls(xt, yt, 2), xv)).maxCoeff() < 1e-8);
    CHECK(kind_of([&] { fit_pls(xt, yt, 3); }) == ErrorKind::RankExhausted);
  }
}

TEST_CASE("mouth-corner distance tracks valence") {
  GeneratorConfig c = small_config(1, 1);
  c.noise_std = 0.0;
  std::mt19937_64 rng(64);
  const Eigen::Index flat = pair_to_flat(kMouthCornerLeft, kMouthCornerRight, 49);
  CHECK(flat == 1028);
  double previous = -1.0;
  for (double v : {-0.9, -0.4, 0.0, 0.4, 0.9}) {
    const LandmarkSet face = synth_face(AffectLabel{0.0, v, std::abs(v)}, neutral_subject(), c, rng);
    const double d = pairwise_distances(face)(flat);
    CHECK(d > previous);
    previous = d;
  }
}
