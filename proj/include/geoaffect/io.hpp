#pragma once

#include "geoaffect/frontalization.hpp"
#include "geoaffect/simgen.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoaffect {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Landmark CSV:
///   subject_id,sample_id,yaw,pitch,roll,x0..x{N-1},y0..y{N-1}[,arousal,valence,intensity]
/// Empty cells mean "absent" for the metadata columns. Label columns are
/// written when every sample carries a label.
void write_landmark_csv(std::ostream& out, std::span<const Sample> samples);
std::vector<Sample> read_landmark_csv(std::istream& in);

/// Pairs CSV: the landmark schema for the posed view followed by the true
/// frontal view in fx0..fx{N-1},fy0..fy{N-1}.
void write_pairs_csv(std::ostream& out, std::span<const FrontalPair> pairs);
std::vector<FrontalPair> read_pairs_csv(std::istream& in);

/// Feature CSV: sample_id,f0..f{M-1}.
void write_feature_csv(std::ostream& out, std::span<const std::string> sample_ids,
                       const Eigen::MatrixXd& features);

/// Prediction CSV: sample_id,arousal,valence,intensity.
void write_prediction_csv(std::ostream& out, std::span<const std::string> sample_ids,
                          const Eigen::MatrixXd& predictions);

/// CSV with a header row and numeric body, as written by the writers above.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

std::vector<Sample> load_landmark_csv(const std::string& path);
std::vector<FrontalPair> load_pairs_csv(const std::string& path);

void write_text_file(const std::string& path, std::string_view contents);
std::string read_text_file(const std::string& path);

}  // namespace geoaffect
