#pragma once

#include "catarray/config.hpp"
#include "catarray/geometry.hpp"
#include "catarray/metrics.hpp"
#include "catarray/params.hpp"
#include "catarray/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace catarray {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Number formatting: locale independent, shortest round-trip form.

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError("malformed number '" + std::string(field) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view field) {
  long long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError("malformed integer '" + std::string(field) + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Strict CSV: comma separated, LF line endings, one header row, no quoting.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": CR line ending");
    }
    if (line_no == 1) {
      table.header = split_fields(line);
      continue;
    }
    if (line.empty()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": empty line");
    }
    auto fields = split_fields(line);
    if (fields.size() != table.header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (line_no == 0) throw IoError(path.string() + ": empty file");
  return table;
}

inline void expect_header(const CsvTable& table, const std::vector<std::string>& expected,
                          const std::filesystem::path& path) {
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw IoError(path.string() + ": header must be '" + want + "'");
  }
}

/// Writes `text` to `path`, replacing any existing file.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  s += '\n';
  return s;
}

// ---------------------------------------------------------------------------
// Run directory layout

inline std::string indexed_name(const char* stem, std::size_t t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05zu.csv", stem, t);
  return buf;
}

inline std::filesystem::path frame_path(const std::filesystem::path& dir, std::size_t t) {
  return dir / indexed_name("frame", t);
}

inline std::filesystem::path labels_path(const std::filesystem::path& dir, std::size_t t) {
  return dir / indexed_name("labels", t);
}

inline std::filesystem::path truth_path(const std::filesystem::path& dir) {
  return dir / "truth.csv";
}

inline void write_frame(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string s = "x,y,z\n";
  for (const auto& p : cloud.points) {
    s += join_row({format_double(p.x()), format_double(p.y()), format_double(p.z())});
  }
  write_text(path, s);
}

inline PointCloud read_frame(const std::filesystem::path& path, std::size_t frame_index = 0) {
  const CsvTable t = read_csv(path);
  expect_header(t, {"x", "y", "z"}, path);
  PointCloud cloud;
  cloud.frame_index = frame_index;
  cloud.points.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    cloud.points.emplace_back(parse_double(r[0]), parse_double(r[1]), parse_double(r[2]));
  }
  return cloud;
}

/// Labels on disk are a conductor index or -1 for anything else.
inline void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::string s = "label\n";
  for (int l : labels) s += std::to_string(l >= 0 ? l : -1) + '\n';
  write_text(path, s);
}

inline std::vector<int> read_labels(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, {"label"}, path);
  std::vector<int> labels;
  labels.reserve(t.rows.size());
  for (const auto& r : t.rows) labels.push_back(static_cast<int>(parse_integer(r[0])));
  return labels;
}

inline std::vector<std::string> parameter_names(int offset_count) {
  std::vector<std::string> names{"x_o", "y_o", "z_o", "psi", "a"};
  for (int l = 1; l <= offset_count; ++l) names.push_back("delta_" + std::to_string(l));
  return names;
}

inline std::vector<std::string> format_values(const Eigen::VectorXd& v) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_double(v[i]));
  return out;
}

inline void write_truth(const std::filesystem::path& path, const ParamVector& p) {
  write_text(path, join_row(parameter_names(p.offset_count())) + join_row(format_values(p.values())));
}

inline ParamVector read_truth(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 5) throw IoError(path.string() + ": truth needs at least 5 columns");
  expect_header(t, parameter_names(static_cast<int>(t.header.size()) - 5), path);
  if (t.rows.size() != 1) throw IoError(path.string() + ": truth must hold exactly one row");
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = parse_double(t.rows[0][i]);
  }
  return ParamVector(v);
}

/// Frame files of a run directory, in index order. Indices must run 0..n-1.
inline std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (std::size_t t = 0;; ++t) {
    const auto p = frame_path(dir, t);
    if (!std::filesystem::exists(p)) break;
    out.push_back(p);
  }
  if (out.empty()) throw IoError("no frame_00000.csv in " + dir.string());
  return out;
}

// ---------------------------------------------------------------------------
// Result tables

inline std::string curves_csv(const std::vector<std::vector<Point3>>& curves) {
  std::string s = "conductor_k,x,y,z\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    for (const auto& p : curves[k]) {
      s += join_row({std::to_string(k), format_double(p.x()), format_double(p.y()),
                     format_double(p.z())});
    }
  }
  return s;
}

inline void write_curves(const std::filesystem::path& path,
                         const std::vector<std::vector<Point3>>& curves) {
  write_text(path, curves_csv(curves));
}

inline const std::vector<std::string>& study_header() {
  static const std::vector<std::string> h{"n_o",       "n_pts_mean", "n_pts_std", "dt_ms_mean",
                                          "dt_ms_std", "acc_mean",   "acc_std",   "psi_e_mean",
                                          "psi_e_std", "a_e_mean",   "a_e_std"};
  return h;
}

inline std::string study_csv(const std::vector<StudyRow>& rows) {
  std::string s = join_row(study_header());
  for (const auto& r : rows) {
    s += join_row({std::to_string(r.n_outliers), format_double(r.n_pts.mean),
                   format_double(r.n_pts.std), format_double(r.dt_ms.mean),
                   format_double(r.dt_ms.std), format_double(r.accuracy.mean),
                   format_double(r.accuracy.std), format_double(r.psi_error.mean),
                   format_double(r.psi_error.std), format_double(r.a_error.mean),
                   format_double(r.a_error.std)});
  }
  return s;
}

}  // namespace catarray
