#pragma once

#include "geoaffect/pipeline.hpp"
#include "geoaffect/serialize.hpp"
#include "geoaffect/simgen.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geoaffect {

inline constexpr double kDefaultSelectionEpsilon = 0.02;
inline constexpr double kDefaultValidationFraction = 0.08;

/// Explicit validation subjects win; otherwise round(target_fraction * S)
/// subjects (at least 1, at most S-1) are drawn with the seed.
struct SplitSpec {
  std::vector<std::string> validation_subjects;
  std::uint64_t seed = 0;
  double target_fraction = kDefaultValidationFraction;
};

struct Split {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<std::string> validation_subjects;  // sorted
  double achieved_fraction = 0.0;                // validation samples / all samples
};

/// Throws SchemaViolation when a sample has no subject_id and
/// InsufficientSubjects when fewer than 2 subjects exist.
Split split_by_subject(std::span<const Sample> samples, const SplitSpec& spec);

/// Training and validation matrices for one split.
struct Problem {
  Eigen::MatrixXd x_train;
  Eigen::MatrixXd y_train;
  Eigen::MatrixXd x_val;
  Eigen::MatrixXd y_val;
};

Problem make_problem(const FrontalizerModel& frontalizer, const Split& split);

/// One row per k; columns are outputs.
struct SweepResult {
  std::vector<Eigen::Index> k_values;
  Eigen::MatrixXd train_mse;
  Eigen::MatrixXd val_mse;
  Eigen::Index selected_k = 0;
  bool truncated = false;  // the cross product was exhausted before k_max
};

/// PLS fits for k = 1..k_max. SIMPLS components are nested, so a single
/// k_max fit is computed and each k uses its leading components.
SweepResult sweep_components(const Problem& problem, Eigen::Index k_max,
                             double epsilon = kDefaultSelectionEpsilon);

/// Smallest k whose mean validation MSE over outputs is within
/// (1 + epsilon) of the minimum.
Eigen::Index select_k(const SweepResult& result, double epsilon = kDefaultSelectionEpsilon);

struct BaselineRow {
  MethodSpec method;
  std::string label;
  std::optional<Eigen::VectorXd> mse;
  std::string error;  // set when the fit failed
};

struct BaselineTable {
  std::vector<BaselineRow> rows;
  std::vector<int> best_row;  // per output column, -1 if no row succeeded
};

/// Fits each config on the training part and scores validation MSE. A failed
/// fit is recorded in its row and does not stop the others.
BaselineTable compare_baselines(const Problem& problem, std::span<const MethodSpec> configs);

struct NamedRegressor {
  std::string name;
  Regressor regressor;
};

struct ShiftRow {
  std::string name;
  Eigen::VectorXd nominal_mse;
  Eigen::VectorXd shifted_mse;
  Eigen::VectorXd degradation;  // shifted / nominal per output
  double overall_degradation = 1.0;  // mean shifted MSE / mean nominal MSE
};

/// Rows sorted by overall degradation, most stable first (stable on ties).
struct ShiftReport {
  std::vector<ShiftRow> rows;
};

ShiftReport shift_eval(std::span<const NamedRegressor> models, const Eigen::MatrixXd& x_nominal,
                       const Eigen::MatrixXd& y_nominal, const Eigen::MatrixXd& x_shifted,
                       const Eigen::MatrixXd& y_shifted);

/// Perturbation of the generator used to build an out-of-distribution
/// validation set.
struct ShiftSpec {
  double identity_variance_scale = 4.0;
  double noise_std = 0.03;
  double landmark_jitter = 0.02;  // extra 2D jitter on the projected landmarks
  std::uint64_t seed = 99;
};

GeneratorConfig shifted_config(const GeneratorConfig& base, const ShiftSpec& shift);

/// Adds N(0, amplitude^2) to every coordinate; amplitude 0 returns the input.
std::vector<Sample> jitter_samples(std::span<const Sample> samples, double amplitude, std::uint64_t seed);

Json to_json(const SweepResult& result);
Json to_json(const BaselineTable& table);
Json to_json(const ShiftReport& report);

std::string format_table(const SweepResult& result);
std::string format_table(const BaselineTable& table);
std::string format_table(const ShiftReport& report);

/// k,train_<output>...,val_<output>... for external plotting.
std::string sweep_csv(const SweepResult& result);

}  // namespace geoaffect
