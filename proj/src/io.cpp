#include "geoaffect/io.hpp"

#include "geoaffect/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace geoaffect {
namespace {

constexpr std::string_view kMetaColumns[] = {"subject_id", "sample_id", "yaw", "pitch", "roll"};
constexpr std::string_view kLabelColumns[] = {"arousal", "valence", "intensity"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void schema_error(const std::string& message) { fail(ErrorKind::SchemaViolation, message); }

double parse_number(const std::string& cell, size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    schema_error("row " + std::to_string(row) + ", column " + column + ": '" + cell + "' is not a number");
  }
  return value;
}

std::optional<std::string> optional_text(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return cell;
}

std::string coord_name(char prefix_axis, Eigen::Index i, std::string_view prefix = "") {
  return std::string(prefix) + prefix_axis + std::to_string(i);
}

// Number of landmarks implied by the coordinate columns starting at `first`,
// with column names <prefix>x0..,<prefix>y0...
Eigen::Index coordinate_block(const std::vector<std::string>& header, size_t first, std::string_view prefix) {
  Eigen::Index n = 0;
  while (first + static_cast<size_t>(n) < header.size() && header[first + static_cast<size_t>(n)] == coord_name('x', n, prefix)) ++n;
  if (n < 3) schema_error("expected at least 3 " + std::string(prefix) + "x columns");
  for (Eigen::Index i = 0; i < n; ++i) {
    const size_t col = first + static_cast<size_t>(n + i);
    if (col >= header.size() || header[col] != coord_name('y', i, prefix)) {
      schema_error("expected column " + coord_name('y', i, prefix));
    }
  }
  return n;
}

void write_meta(std::ostream& out, const LandmarkSet& lm) {
  out << lm.subject_id.value_or("") << ',' << lm.sample_id.value_or("");
  for (int axis = 0; axis < 3; ++axis) {
    out << ',';
    if (lm.pose) {
      const double v = axis == 0 ? lm.pose->yaw : axis == 1 ? lm.pose->pitch : lm.pose->roll;
      out << format_double(v);
    }
  }
}

void write_coordinates(std::ostream& out, const Points& points) {
  for (int axis = 0; axis < 2; ++axis) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) out << ',' << format_double(points(i, axis));
  }
}

void write_header(std::ostream& out, Eigen::Index n_points, bool with_frontal, bool with_labels) {
  for (size_t c = 0; c < std::size(kMetaColumns); ++c) out << (c ? "," : "") << kMetaColumns[c];
  const std::string_view prefixes[] = {"", "f"};
  for (int block = 0; block < (with_frontal ? 2 : 1); ++block) {
    for (char axis : {'x', 'y'}) {
      for (Eigen::Index i = 0; i < n_points; ++i) out << ',' << coord_name(axis, i, prefixes[block]);
    }
  }
  if (with_labels) {
    for (auto name : kLabelColumns) out << ',' << name;
  }
  out << '\n';
}

// Parses the metadata cells and a coordinate block of one row.
LandmarkSet parse_landmarks(const std::vector<std::string>& cells, size_t row, Eigen::Index n_points,
                            size_t first_coord, const std::vector<std::string>& header, bool with_meta) {
  LandmarkSet lm{Points(n_points, 2)};
  if (with_meta) {
    lm.subject_id = optional_text(cells[0]);
    lm.sample_id = optional_text(cells[1]);
    const bool any_pose = !cells[2].empty() || !cells[3].empty() || !cells[4].empty();
    if (any_pose) {
      if (cells[2].empty() || cells[3].empty() || cells[4].empty()) {
        schema_error("row " + std::to_string(row) + ": pose must be given for all of yaw, pitch, roll or none");
      }
      lm.pose = HeadPose{parse_number(cells[2], row, "yaw"), parse_number(cells[3], row, "pitch"),
                         parse_number(cells[4], row, "roll")};
    }
  }
  for (Eigen::Index i = 0; i < 2 * n_points; ++i) {
    const size_t col = first_coord + static_cast<size_t>(i);
    lm.points(i % n_points, i / n_points) = parse_number(cells[col], row, header[col]);
  }
  if (!lm.points.allFinite()) schema_error("row " + std::to_string(row) + ": non-finite coordinate");
  return lm;
}

void check_meta_header(const std::vector<std::string>& header) {
  if (header.size() < std::size(kMetaColumns)) schema_error("header is missing metadata columns");
  for (size_t c = 0; c < std::size(kMetaColumns); ++c) {
    if (header[c] != kMetaColumns[c]) {
      schema_error("header column " + std::to_string(c) + " must be '" + std::string(kMetaColumns[c]) + "'");
    }
  }
}

bool has_label_tail(const std::vector<std::string>& header, size_t first) {
  if (header.size() == first) return false;
  if (header.size() != first + 3) schema_error("unexpected trailing columns after coordinates");
  for (size_t c = 0; c < 3; ++c) {
    if (header[first + c] != kLabelColumns[c]) schema_error("label columns must be arousal,valence,intensity");
  }
  return true;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) fail(ErrorKind::NonFinite, "cannot format number");
  return std::string(buf, ptr);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) schema_error("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      schema_error("row " + std::to_string(table.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                   " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_landmark_csv(std::ostream& out, std::span<const Sample> samples) {
  const Eigen::Index n_points = samples.empty() ? kDefaultLandmarks : samples.front().landmarks.n_points();
  bool with_labels = !samples.empty();
  for (const auto& s : samples) {
    if (s.landmarks.n_points() != n_points) fail(ErrorKind::ShapeMismatch, "samples differ in landmark count");
    with_labels = with_labels && s.label.has_value();
  }
  write_header(out, n_points, false, with_labels);
  for (const auto& s : samples) {
    write_meta(out, s.landmarks);
    write_coordinates(out, s.landmarks.points);
    if (with_labels) {
      out << ',' << format_double(s.label->arousal) << ',' << format_double(s.label->valence) << ','
          << format_double(s.label->intensity);
    }
    out << '\n';
  }
}

std::vector<Sample> read_landmark_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  check_meta_header(table.header);
  const size_t first = std::size(kMetaColumns);
  const Eigen::Index n_points = coordinate_block(table.header, first, "");
  const bool labels = has_label_tail(table.header, first + static_cast<size_t>(2 * n_points));

  std::vector<Sample> samples;
  samples.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    Sample sample{parse_landmarks(cells, r + 1, n_points, first, table.header, true), std::nullopt};
    if (labels) {
      const size_t l = first + static_cast<size_t>(2 * n_points);
      AffectLabel label{parse_number(cells[l], r + 1, "arousal"), parse_number(cells[l + 1], r + 1, "valence"),
                        parse_number(cells[l + 2], r + 1, "intensity")};
      try {
        validate(label);
      } catch (const Error& e) {
        schema_error("row " + std::to_string(r + 1) + ": " + e.what());
      }
      sample.label = label;
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

void write_pairs_csv(std::ostream& out, std::span<const FrontalPair> pairs) {
  const Eigen::Index n_points = pairs.empty() ? kDefaultLandmarks : pairs.front().posed.n_points();
  write_header(out, n_points, true, false);
  for (const auto& p : pairs) {
    if (p.posed.n_points() != n_points || p.frontal.n_points() != n_points) {
      fail(ErrorKind::ShapeMismatch, "pairs differ in landmark count");
    }
    write_meta(out, p.posed);
    write_coordinates(out, p.posed.points);
    write_coordinates(out, p.frontal.points);
    out << '\n';
  }
}

std::vector<FrontalPair> read_pairs_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  check_meta_header(table.header);
  const size_t first = std::size(kMetaColumns);
  const Eigen::Index n_points = coordinate_block(table.header, first, "");
  const size_t frontal_first = first + static_cast<size_t>(2 * n_points);
  if (coordinate_block(table.header, frontal_first, "f") != n_points) {
    schema_error("posed and frontal blocks differ in landmark count");
  }
  if (table.header.size() != frontal_first + static_cast<size_t>(2 * n_points)) {
    schema_error("unexpected trailing columns in pairs CSV");
  }
  std::vector<FrontalPair> pairs;
  pairs.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    FrontalPair pair;
    pair.posed = parse_landmarks(table.rows[r], r + 1, n_points, first, table.header, true);
    pair.frontal = parse_landmarks(table.rows[r], r + 1, n_points, frontal_first, table.header, false);
    pair.frontal.subject_id = pair.posed.subject_id;
    pair.frontal.sample_id = pair.posed.sample_id;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_feature_csv(std::ostream& out, std::span<const std::string> sample_ids, const Eigen::MatrixXd& features) {
  if (static_cast<Eigen::Index>(sample_ids.size()) != features.rows()) {
    fail(ErrorKind::ShapeMismatch, "one sample id per feature row required");
  }
  out << "sample_id";
  for (Eigen::Index c = 0; c < features.cols(); ++c) out << ",f" << c;
  out << '\n';
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    out << sample_ids[static_cast<size_t>(r)];
    for (Eigen::Index c = 0; c < features.cols(); ++c) out << ',' << format_double(features(r, c));
    out << '\n';
  }
}

void write_prediction_csv(std::ostream& out, std::span<const std::string> sample_ids,
                          const Eigen::MatrixXd& predictions) {
  if (static_cast<Eigen::Index>(sample_ids.size()) != predictions.rows() || predictions.cols() != 3) {
    fail(ErrorKind::ShapeMismatch, "prediction matrix must be n x 3 with one sample id per row");
  }
  out << "sample_id,arousal,valence,intensity\n";
  for (Eigen::Index r = 0; r < predictions.rows(); ++r) {
    out << sample_ids[static_cast<size_t>(r)];
    for (Eigen::Index c = 0; c < 3; ++c) out << ',' << format_double(predictions(r, c));
    out << '\n';
  }
}

std::vector<Sample> load_landmark_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open " + path);
  return read_landmark_csv(in);
}

std::vector<FrontalPair> load_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open " + path);
  return read_pairs_csv(in);
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Usage, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::Usage, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Usage, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace geoaffect
