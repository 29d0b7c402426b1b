#include "geoaffect/serialize.hpp"

#include "geoaffect/error.hpp"
#include "geoaffect/io.hpp"

#include <set>

namespace geoaffect {
namespace {

[[noreturn]] void schema_error(const std::string& message) { fail(ErrorKind::SchemaViolation, message); }

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double number(const Json& value, const char* what) {
  if (!value.is_number()) schema_error(std::string(what) + " must be a number");
  return value.get<double>();
}

Eigen::Index count(const Json& value, const char* what) {
  if (!value.is_number_integer()) schema_error(std::string(what) + " must be an integer");
  return value.get<Eigen::Index>();
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& doc, const char* what) {
  if (!doc.is_array()) schema_error(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (size_t i = 0; i < doc.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(doc[i], what);
  return v;
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& doc, const char* what) {
  if (!doc.is_array()) schema_error(std::string(what) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(doc[0].is_array() ? doc[0].size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = doc[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      schema_error(std::string(what) + " rows must be arrays of equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<size_t>(c)], what);
  }
  return m;
}

Json to_json(const FrontalizerModel& model) {
  return Json{{"n_points", model.n_points},
              {"ridge_lambda", model.ridge_lambda},
              {"weights", matrix_to_json(model.weights)},
              {"train_pose_envelope", Json::array({model.max_abs_yaw, model.max_abs_pitch})}};
}

FrontalizerModel frontalizer_from_json(const Json& doc) {
  FrontalizerModel model;
  model.n_points = count(field(doc, "n_points"), "n_points");
  model.ridge_lambda = number(field(doc, "ridge_lambda"), "ridge_lambda");
  model.weights = matrix_from_json(field(doc, "weights"), "weights");
  const Json& envelope = field(doc, "train_pose_envelope");
  if (!envelope.is_array() || envelope.size() != 2) schema_error("train_pose_envelope must be [yaw, pitch]");
  model.max_abs_yaw = number(envelope[0], "train_pose_envelope");
  model.max_abs_pitch = number(envelope[1], "train_pose_envelope");
  try {
    validate(model);
  } catch (const Error& e) {
    schema_error(std::string("invalid frontalizer: ") + e.what());
  }
  return model;
}

Json to_json(const Regressor& regressor) {
  if (const auto* pls = std::get_if<PlsModel<double>>(&regressor)) {
    return Json{{"kind", "pls"},
                {"k", pls->n_components()},
                {"x_mean", vector_to_json(pls->x_mean)},
                {"y_mean", vector_to_json(pls->y_mean)},
                {"B", matrix_to_json(pls->coefficients)},
                {"R", matrix_to_json(pls->weights)},
                {"P", matrix_to_json(pls->x_loadings)},
                {"Q", matrix_to_json(pls->y_loadings)}};
  }
  const auto& lin = std::get<LinearModel<double>>(regressor);
  Json doc{{"x_mean", vector_to_json(lin.x_mean)}, {"y_mean", vector_to_json(lin.y_mean)},
           {"B", matrix_to_json(lin.coefficients)}};
  switch (lin.kind) {
    case LinearKind::Ols:
      doc["kind"] = "ols";
      doc["pseudo_inverse"] = lin.pseudo_inverse;
      break;
    case LinearKind::Ridge:
      doc["kind"] = "ridge";
      doc["alpha"] = lin.alpha;
      doc["pseudo_inverse"] = lin.pseudo_inverse;
      break;
    case LinearKind::Pcr:
      doc["kind"] = "pcr";
      doc["k"] = lin.components;
      break;
  }
  return doc;
}

Regressor regressor_from_json(const Json& doc) {
  const Json& kind_field = field(doc, "kind");
  if (!kind_field.is_string()) schema_error("kind must be a string");
  const auto kind = kind_field.get<std::string>();
  const Eigen::VectorXd x_mean = vector_from_json(field(doc, "x_mean"), "x_mean");
  const Eigen::VectorXd y_mean = vector_from_json(field(doc, "y_mean"), "y_mean");
  const Eigen::MatrixXd b = matrix_from_json(field(doc, "B"), "B");
  if (b.rows() != x_mean.size() || b.cols() != y_mean.size()) schema_error("B must be len(x_mean) x len(y_mean)");

  if (kind == "pls") {
    PlsModel<double> model;
    model.x_mean = x_mean;
    model.y_mean = y_mean;
    model.coefficients = b;
    model.weights = matrix_from_json(field(doc, "R"), "R");
    model.x_loadings = matrix_from_json(field(doc, "P"), "P");
    model.y_loadings = matrix_from_json(field(doc, "Q"), "Q");
    const Eigen::Index k = count(field(doc, "k"), "k");
    if (model.weights.rows() != x_mean.size() || model.weights.cols() != k || model.x_loadings.rows() != x_mean.size() ||
        model.x_loadings.cols() != k || model.y_loadings.rows() != y_mean.size() || model.y_loadings.cols() != k) {
      schema_error("PLS matrices R, P, Q inconsistent with k and the mean vectors");
    }
    return model;
  }

  LinearModel<double> model;
  model.x_mean = x_mean;
  model.y_mean = y_mean;
  model.coefficients = b;
  if (doc.contains("pseudo_inverse")) {
    if (!doc["pseudo_inverse"].is_boolean()) schema_error("pseudo_inverse must be a boolean");
    model.pseudo_inverse = doc["pseudo_inverse"].get<bool>();
  }
  if (kind == "ols") {
    model.kind = LinearKind::Ols;
  } else if (kind == "ridge") {
    model.kind = LinearKind::Ridge;
    model.alpha = number(field(doc, "alpha"), "alpha");
  } else if (kind == "pcr") {
    model.kind = LinearKind::Pcr;
    model.components = count(field(doc, "k"), "k");
  } else {
    schema_error("unknown regressor kind '" + kind + "'");
  }
  if (!model.coefficients.allFinite()) schema_error("coefficients must be finite");
  return model;
}

Json to_json(const PipelineBundle& bundle) {
  return Json{{"format_version", bundle.format_version},
              {"n_points", bundle.n_points},
              {"frontalizer", to_json(bundle.frontalizer)},
              {"regressor", to_json(bundle.regressor)}};
}

PipelineBundle bundle_from_json(const Json& doc) {
  PipelineBundle bundle{frontalizer_from_json(field(doc, "frontalizer")), regressor_from_json(field(doc, "regressor")),
                        count(field(doc, "n_points"), "n_points"),
                        static_cast<int>(count(field(doc, "format_version"), "format_version"))};
  validate(bundle);
  return bundle;
}

Json to_json(const GeneratorConfig& config) {
  return Json{{"n_subjects", config.n_subjects},
              {"samples_per_subject", config.samples_per_subject},
              {"identity_variance", config.identity_variance},
              {"expression_gain", config.expression_gain},
              {"nonlinearity_gain", config.nonlinearity_gain},
              {"noise_std", config.noise_std},
              {"seed", config.seed},
              {"pose_ranges", Json::array({config.pose_ranges.yaw_max, config.pose_ranges.pitch_max,
                                           config.pose_ranges.roll_max})},
              {"posed_copies", config.posed_copies}};
}

GeneratorConfig generator_config_from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorKind::ConfigInvalid, "generator config must be a JSON object");
  static const std::set<std::string> known = {"n_subjects",  "samples_per_subject", "identity_variance",
                                              "expression_gain", "nonlinearity_gain", "noise_std",
                                              "seed",        "pose_ranges",         "posed_copies"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) fail(ErrorKind::ConfigInvalid, "unknown generator config key '" + key + "'");
  }
  GeneratorConfig config;
  try {
    if (doc.contains("n_subjects")) config.n_subjects = doc["n_subjects"].get<int>();
    if (doc.contains("samples_per_subject")) config.samples_per_subject = doc["samples_per_subject"].get<int>();
    if (doc.contains("identity_variance")) config.identity_variance = doc["identity_variance"].get<double>();
    if (doc.contains("expression_gain")) config.expression_gain = doc["expression_gain"].get<double>();
    if (doc.contains("nonlinearity_gain")) config.nonlinearity_gain = doc["nonlinearity_gain"].get<double>();
    if (doc.contains("noise_std")) config.noise_std = doc["noise_std"].get<double>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("posed_copies")) config.posed_copies = doc["posed_copies"].get<int>();
    if (doc.contains("pose_ranges")) {
      const auto& p = doc["pose_ranges"];
      if (!p.is_array() || p.size() != 3) fail(ErrorKind::ConfigInvalid, "pose_ranges must be [yaw, pitch, roll]");
      config.pose_ranges = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::ConfigInvalid, std::string("generator config: ") + e.what());
  }
  validate(config);
  return config;
}

Json load_json_file(const std::string& path, ErrorKind kind) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(kind, path + ": " + e.what());
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace geoaffect
