#include "geoaffect/modelsel.hpp"

#include "geoaffect/error.hpp"
#include "geoaffect/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace geoaffect {
namespace {

std::string fixed(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string pad(const std::string& text, size_t width, bool left = false) {
  if (text.size() >= width) return text;
  return left ? text + std::string(width - text.size(), ' ') : std::string(width - text.size(), ' ') + text;
}

Json output_names() {
  Json names = Json::array();
  for (auto name : kOutputNames) names.push_back(std::string(name));
  return names;
}

Json row_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

Split split_by_subject(std::span<const Sample> samples, const SplitSpec& spec) {
  std::set<std::string> subjects;
  for (const auto& s : samples) {
    if (!s.landmarks.subject_id) {
      fail(ErrorKind::SchemaViolation, "subject-disjoint split needs a subject_id on every sample");
    }
    subjects.insert(*s.landmarks.subject_id);
  }
  if (subjects.size() < 2) {
    fail(ErrorKind::InsufficientSubjects, "need at least 2 subjects, found " + std::to_string(subjects.size()));
  }

  std::set<std::string> validation;
  if (!spec.validation_subjects.empty()) {
    for (const auto& id : spec.validation_subjects) {
      if (!subjects.contains(id)) fail(ErrorKind::Usage, "validation subject '" + id + "' not in dataset");
      validation.insert(id);
    }
    if (validation.size() == subjects.size()) {
      fail(ErrorKind::InsufficientSubjects, "validation subjects leave no training subjects");
    }
  } else {
    if (!(spec.target_fraction > 0.0 && spec.target_fraction < 1.0)) {
      fail(ErrorKind::Usage, "target_fraction must lie in (0, 1)");
    }
    std::vector<std::string> order(subjects.begin(), subjects.end());
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto total = static_cast<long>(order.size());
    const long wanted = std::clamp(std::lround(spec.target_fraction * static_cast<double>(total)), 1L, total - 1);
    validation.insert(order.begin(), order.begin() + wanted);
  }

  Split split;
  for (const auto& s : samples) {
    (validation.contains(*s.landmarks.subject_id) ? split.validation : split.train).push_back(s);
  }
  split.validation_subjects.assign(validation.begin(), validation.end());
  split.achieved_fraction = samples.empty() ? 0.0
                                            : static_cast<double>(split.validation.size()) /
                                                  static_cast<double>(samples.size());
  return split;
}

Problem make_problem(const FrontalizerModel& frontalizer, const Split& split) {
  return {feature_matrix(frontalizer, split.train), label_matrix(split.train),
          feature_matrix(frontalizer, split.validation), label_matrix(split.validation)};
}

SweepResult sweep_components(const Problem& problem, Eigen::Index k_max, double epsilon) {
  PlsOptions options;
  options.truncate_on_exhaustion = true;
  const auto fit = fit_pls_detailed(problem.x_train, problem.y_train, k_max, options);
  const auto& model = fit.model;
  const Eigen::Index k_done = model.n_components();

  const Eigen::MatrixXd train_scores = (problem.x_train.rowwise() - model.x_mean.transpose()) * model.weights;
  const Eigen::MatrixXd val_scores = (problem.x_val.rowwise() - model.x_mean.transpose()) * model.weights;
  Eigen::MatrixXd train_hat = Eigen::MatrixXd::Zero(problem.y_train.rows(), problem.y_train.cols()).rowwise() +
                              model.y_mean.transpose();
  Eigen::MatrixXd val_hat = Eigen::MatrixXd::Zero(problem.y_val.rows(), problem.y_val.cols()).rowwise() +
                            model.y_mean.transpose();

  SweepResult result;
  result.truncated = fit.diagnostics.truncated;
  result.train_mse.resize(k_done, problem.y_train.cols());
  result.val_mse.resize(k_done, problem.y_train.cols());
  for (Eigen::Index a = 0; a < k_done; ++a) {
    train_hat += train_scores.col(a) * model.y_loadings.col(a).transpose();
    val_hat += val_scores.col(a) * model.y_loadings.col(a).transpose();
    result.k_values.push_back(a + 1);
    result.train_mse.row(a) = mse(problem.y_train, train_hat).transpose();
    result.val_mse.row(a) = mse(problem.y_val, val_hat).transpose();
  }
  result.selected_k = select_k(result, epsilon);
  return result;
}

Eigen::Index select_k(const SweepResult& result, double epsilon) {
  if (result.k_values.empty()) fail(ErrorKind::Usage, "empty sweep");
  if (!(epsilon >= 0.0)) fail(ErrorKind::Usage, "epsilon must be >= 0");
  const Eigen::VectorXd mean_mse = result.val_mse.rowwise().mean();
  const double best = mean_mse.minCoeff();
  for (Eigen::Index i = 0; i < mean_mse.size(); ++i) {
    if (mean_mse(i) <= (1.0 + epsilon) * best) return result.k_values[static_cast<size_t>(i)];
  }
  return result.k_values.back();
}

BaselineTable compare_baselines(const Problem& problem, std::span<const MethodSpec> configs) {
  BaselineTable table;
  for (const auto& method : configs) {
    BaselineRow row{method, display_name(method), std::nullopt, {}};
    try {
      const Regressor regressor = fit_regressor(method, problem.x_train, problem.y_train);
      row.mse = mse(problem.y_val, predict(regressor, problem.x_val));
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  const Eigen::Index outputs = problem.y_train.cols();
  table.best_row.assign(static_cast<size_t>(outputs), -1);
  for (Eigen::Index c = 0; c < outputs; ++c) {
    for (size_t r = 0; r < table.rows.size(); ++r) {
      if (!table.rows[r].mse) continue;
      const int best = table.best_row[static_cast<size_t>(c)];
      if (best < 0 || (*table.rows[r].mse)(c) < (*table.rows[static_cast<size_t>(best)].mse)(c)) {
        table.best_row[static_cast<size_t>(c)] = static_cast<int>(r);
      }
    }
  }
  return table;
}

ShiftReport shift_eval(std::span<const NamedRegressor> models, const Eigen::MatrixXd& x_nominal,
                       const Eigen::MatrixXd& y_nominal, const Eigen::MatrixXd& x_shifted,
                       const Eigen::MatrixXd& y_shifted) {
  if (x_nominal.cols() != x_shifted.cols() || y_nominal.cols() != y_shifted.cols()) {
    fail(ErrorKind::ShapeMismatch, "nominal and shifted sets differ in width");
  }
  ShiftReport report;
  for (const auto& m : models) {
    ShiftRow row;
    row.name = m.name;
    row.nominal_mse = mse(y_nominal, predict(m.regressor, x_nominal));
    row.shifted_mse = mse(y_shifted, predict(m.regressor, x_shifted));
    row.degradation = row.shifted_mse.cwiseQuotient(row.nominal_mse);
    row.overall_degradation = row.shifted_mse.mean() / row.nominal_mse.mean();
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ShiftRow& a, const ShiftRow& b) { return a.overall_degradation < b.overall_degradation; });
  return report;
}

GeneratorConfig shifted_config(const GeneratorConfig& base, const ShiftSpec& shift) {
  if (!(shift.identity_variance_scale >= 0.0) || !(shift.noise_std >= 0.0) || !(shift.landmark_jitter >= 0.0)) {
    fail(ErrorKind::ConfigInvalid, "shift parameters must be non-negative");
  }
  GeneratorConfig out = base;
  out.identity_variance = base.identity_variance * shift.identity_variance_scale;
  out.noise_std = shift.noise_std;
  out.seed = shift.seed;
  out.posed_copies = 0;
  validate(out);
  return out;
}

std::vector<Sample> jitter_samples(std::span<const Sample> samples, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) fail(ErrorKind::ConfigInvalid, "jitter amplitude must be >= 0");
  std::vector<Sample> out(samples.begin(), samples.end());
  if (amplitude == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, amplitude);
  for (auto& s : out) {
    for (Eigen::Index i = 0; i < s.landmarks.points.size(); ++i) s.landmarks.points.data()[i] += noise(rng);
  }
  return out;
}

Json to_json(const SweepResult& result) {
  return Json{{"outputs", output_names()},
              {"k_values", result.k_values},
              {"train_mse", matrix_to_json(result.train_mse)},
              {"val_mse", matrix_to_json(result.val_mse)},
              {"selected_k", result.selected_k},
              {"truncated", result.truncated}};
}

Json to_json(const BaselineTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r{{"method", to_string(row.method)}, {"label", row.label}};
    if (row.mse) {
      r["mse"] = row_vector(*row.mse);
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  return Json{{"outputs", output_names()}, {"rows", rows}, {"best_row", table.best_row}};
}

Json to_json(const ShiftReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back(Json{{"name", row.name},
                        {"nominal_mse", row_vector(row.nominal_mse)},
                        {"shifted_mse", row_vector(row.shifted_mse)},
                        {"degradation", row_vector(row.degradation)},
                        {"overall_degradation", row.overall_degradation}});
  }
  return Json{{"outputs", output_names()}, {"rows", rows}};
}

std::string format_table(const SweepResult& result) {
  std::ostringstream out;
  out << pad("k", 4);
  for (auto name : kOutputNames) out << pad("train_" + std::string(name), 18);
  for (auto name : kOutputNames) out << pad("val_" + std::string(name), 16);
  out << '\n';
  for (size_t i = 0; i < result.k_values.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << pad(std::to_string(result.k_values[i]), 4);
    for (Eigen::Index c = 0; c < result.train_mse.cols(); ++c) out << pad(fixed(result.train_mse(r, c)), 18);
    for (Eigen::Index c = 0; c < result.val_mse.cols(); ++c) out << pad(fixed(result.val_mse(r, c)), 16);
    out << (result.k_values[i] == result.selected_k ? "  <- selected" : "") << '\n';
  }
  if (result.truncated) out << "(sweep truncated: components exhausted)\n";
  return out.str();
}

std::string format_table(const BaselineTable& table) {
  std::ostringstream out;
  size_t width = 6;
  for (const auto& row : table.rows) width = std::max(width, row.label.size());
  out << pad("Method", width + 2, true);
  for (auto name : kOutputNames) out << pad(std::string(name), 14);
  out << '\n';
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out << pad(row.label, width + 2, true);
    if (!row.mse) {
      out << "  failed: " << row.error << '\n';
      continue;
    }
    for (Eigen::Index c = 0; c < row.mse->size(); ++c) {
      const bool best = table.best_row[static_cast<size_t>(c)] == static_cast<int>(r);
      out << pad(fixed((*row.mse)(c)) + (best ? "*" : " "), 14);
    }
    out << '\n';
  }
  out << "(* lowest in column)\n";
  return out.str();
}

std::string format_table(const ShiftReport& report) {
  std::ostringstream out;
  size_t width = 5;
  for (const auto& row : report.rows) width = std::max(width, row.name.size());
  out << pad("Model", width + 2, true) << pad("degradation", 13);
  for (auto name : kOutputNames) out << pad(std::string(name), 12);
  out << '\n';
  for (const auto& row : report.rows) {
    out << pad(row.name, width + 2, true) << pad(fixed(row.overall_degradation), 13);
    for (Eigen::Index c = 0; c < row.degradation.size(); ++c) out << pad(fixed(row.degradation(c)), 12);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "k";
  for (auto name : kOutputNames) out << ",train_" << name;
  for (auto name : kOutputNames) out << ",val_" << name;
  out << '\n';
  for (size_t i = 0; i < result.k_values.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << result.k_values[i];
    for (Eigen::Index c = 0; c < result.train_mse.cols(); ++c) out << ',' << format_double(result.train_mse(r, c));
    for (Eigen::Index c = 0; c < result.val_mse.cols(); ++c) out << ',' << format_double(result.val_mse(r, c));
    out << '\n';
  }
  return out.str();
}

}  // namespace geoaffect
