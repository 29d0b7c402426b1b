#pragma once

#include "geoaffect/frontalization.hpp"
#include "geoaffect/pipeline.hpp"
#include "geoaffect/simgen.hpp"

#include <json.hpp>

#include <string>

namespace geoaffect {

using Json = nlohmann::json;

// Matrices are arrays of rows. Malformed documents raise SchemaViolation,
// invalid generator configs raise ConfigInvalid.

Json to_json(const FrontalizerModel& model);
FrontalizerModel frontalizer_from_json(const Json& doc);

Json to_json(const Regressor& regressor);
Regressor regressor_from_json(const Json& doc);

Json to_json(const PipelineBundle& bundle);
PipelineBundle bundle_from_json(const Json& doc);

Json to_json(const GeneratorConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
GeneratorConfig generator_config_from_json(const Json& doc);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& doc, const char* what);

/// Parse a file, mapping syntax errors to `kind`.
Json load_json_file(const std::string& path, ErrorKind kind = ErrorKind::SchemaViolation);
/// Two-space indented dump with a trailing newline.
std::string dump(const Json& doc);

}  // namespace geoaffect
