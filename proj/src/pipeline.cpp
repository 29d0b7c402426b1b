#include "geoaffect/pipeline.hpp"

#include "geoaffect/error.hpp"
#include "geoaffect/features.hpp"
#include "geoaffect/io.hpp"

#include <charconv>
#include <cmath>

namespace geoaffect {
namespace {

[[noreturn]] void bad_spec(std::string_view text) {
  fail(ErrorKind::Usage, "method spec '" + std::string(text) + "' is not one of pls:k, ridge:alpha, pcr:k, ols");
}

Eigen::Index parse_count(std::string_view text, std::string_view whole) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) bad_spec(whole);
  return static_cast<Eigen::Index>(value);
}

}  // namespace

MethodSpec parse_method_spec(std::string_view text) {
  if (text == "ols") return {MethodSpec::Kind::Ols, 0, 0.0};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) bad_spec(text);
  const auto name = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  if (name == "pls") return {MethodSpec::Kind::Pls, parse_count(arg, text), 0.0};
  if (name == "pcr") return {MethodSpec::Kind::Pcr, parse_count(arg, text), 0.0};
  if (name == "ridge") {
    double alpha = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), alpha);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !(alpha >= 0.0) || !std::isfinite(alpha)) {
      bad_spec(text);
    }
    return {MethodSpec::Kind::Ridge, 0, alpha};
  }
  bad_spec(text);
}

std::string to_string(const MethodSpec& spec) {
  switch (spec.kind) {
    case MethodSpec::Kind::Pls: return "pls:" + std::to_string(spec.components);
    case MethodSpec::Kind::Pcr: return "pcr:" + std::to_string(spec.components);
    case MethodSpec::Kind::Ridge: return "ridge:" + format_double(spec.alpha);
    case MethodSpec::Kind::Ols: return "ols";
  }
  return "";
}

std::string display_name(const MethodSpec& spec) {
  switch (spec.kind) {
    case MethodSpec::Kind::Pls: return "PLS (" + std::to_string(spec.components) + ")";
    case MethodSpec::Kind::Pcr: return "PCR (" + std::to_string(spec.components) + ")";
    case MethodSpec::Kind::Ridge: return "Ridge (alpha=" + format_double(spec.alpha) + ")";
    case MethodSpec::Kind::Ols: return "OLS";
  }
  return "";
}

Regressor fit_regressor(const MethodSpec& spec, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  switch (spec.kind) {
    case MethodSpec::Kind::Pls: return fit_pls(x, y, spec.components);
    case MethodSpec::Kind::Pcr: return fit_pcr(x, y, spec.components);
    case MethodSpec::Kind::Ridge: return fit_ridge(x, y, spec.alpha);
    case MethodSpec::Kind::Ols: return fit_ols(x, y);
  }
  fail(ErrorKind::Usage, "unknown method");
}

const Eigen::MatrixXd& coefficients(const Regressor& regressor) {
  return std::visit([](const auto& model) -> const Eigen::MatrixXd& { return model.coefficients; }, regressor);
}

Eigen::Index feature_width(const Regressor& regressor) {
  return std::visit([](const auto& model) { return model.x_mean.size(); }, regressor);
}

void validate(const PipelineBundle& bundle) {
  if (bundle.format_version != kBundleFormatVersion) {
    fail(ErrorKind::SchemaViolation, "unsupported bundle format_version " + std::to_string(bundle.format_version));
  }
  validate(bundle.frontalizer);
  if (bundle.frontalizer.n_points != bundle.n_points) {
    fail(ErrorKind::SchemaViolation, "frontalizer and bundle disagree on n_points");
  }
  const auto& b = coefficients(bundle.regressor);
  if (feature_width(bundle.regressor) != pair_count(bundle.n_points) || b.rows() != pair_count(bundle.n_points) ||
      b.cols() != 3) {
    fail(ErrorKind::SchemaViolation, "regressor shape does not match N(N-1)/2 features and 3 outputs");
  }
}

Eigen::MatrixXd feature_matrix(const FrontalizerModel& frontalizer, std::span<const Sample> samples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), pair_count(frontalizer.n_points));
  for (size_t r = 0; r < samples.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = pairwise_distances(frontalize(frontalizer, samples[r].landmarks)).transpose();
  }
  return x;
}

Eigen::MatrixXd label_matrix(std::span<const Sample> samples) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples.size()), 3);
  for (size_t r = 0; r < samples.size(); ++r) {
    const auto& label = samples[r].label;
    if (!label) {
      fail(ErrorKind::SchemaViolation, "sample " + samples[r].landmarks.sample_id.value_or(std::to_string(r)) +
                                           " has no arousal/valence/intensity label");
    }
    y.row(static_cast<Eigen::Index>(r)) << label->arousal, label->valence, label->intensity;
  }
  return y;
}

std::vector<std::string> sample_ids(std::span<const Sample> samples) {
  std::vector<std::string> ids;
  ids.reserve(samples.size());
  for (size_t r = 0; r < samples.size(); ++r) ids.push_back(samples[r].landmarks.sample_id.value_or(std::to_string(r)));
  return ids;
}

PipelineBundle train_pipeline(const FrontalizerModel& frontalizer, std::span<const Sample> samples,
                              const MethodSpec& method) {
  validate(frontalizer);
  for (const auto& s : samples) {
    if (s.landmarks.n_points() != frontalizer.n_points) {
      fail(ErrorKind::ShapeMismatch, "training data has " + std::to_string(s.landmarks.n_points()) +
                                         " landmarks, frontalizer expects " + std::to_string(frontalizer.n_points));
    }
  }
  const Eigen::MatrixXd y = label_matrix(samples);
  const Eigen::MatrixXd x = feature_matrix(frontalizer, samples);
  PipelineBundle bundle{frontalizer, fit_regressor(method, x, y), frontalizer.n_points, kBundleFormatVersion};
  validate(bundle);
  return bundle;
}

Eigen::MatrixXd predict(const PipelineBundle& bundle, std::span<const Sample> samples) {
  for (const auto& s : samples) {
    if (s.landmarks.n_points() != bundle.n_points) {
      fail(ErrorKind::ShapeMismatch, "data has " + std::to_string(s.landmarks.n_points()) +
                                         " landmarks, bundle expects " + std::to_string(bundle.n_points));
    }
  }
  return predict(bundle.regressor, feature_matrix(bundle.frontalizer, samples));
}

}  // namespace geoaffect
