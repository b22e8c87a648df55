#include "cic/io.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <unordered_map>

namespace cic {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) fail(errc::malformed_field, "line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(cur);
  return fields;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

std::optional<double> parse_number(const std::string& s, const std::string& column,
                                   std::size_t line_no) {
  if (is_missing(s)) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    fail(errc::malformed_field, "line " + std::to_string(line_no) + ": cannot parse '" + s +
                                    "' in column '" + column + "'");
  }
  return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(errc::missing_column, "column '" + name + "' not found in header");
}

}  // namespace

Dataset load_csv(std::istream& in, const ColumnSpec& columns, StudyDesign design) {
  std::string line;
  if (!std::getline(in, line)) fail(errc::malformed_field, "empty input, expected a header row");
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line, 1);

  std::size_t iy = column_index(header, columns.outcome);
  std::size_t id_ = column_index(header, columns.treatment);
  std::size_t im = column_index(header, columns.mediator);
  std::size_t it = column_index(header, columns.time);
  std::size_t icl = 0;
  bool has_cluster = !columns.cluster.empty();
  if (has_cluster) icl = column_index(header, columns.cluster);
  std::vector<std::size_t> icov;
  for (const auto& name : columns.covariates) icov.push_back(column_index(header, name));

  Dataset data;
  data.design = design;
  data.covariate_names = columns.covariates;
  data.covariate_cols.resize(icov.size());
  std::unordered_map<std::string, std::int32_t> cluster_ids;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line, line_no);
    if (f.size() != header.size()) {
      fail(errc::malformed_field, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(header.size()) + " fields, found " +
                                      std::to_string(f.size()));
    }

    auto y = parse_number(f[iy], columns.outcome, line_no);
    auto d = parse_number(f[id_], columns.treatment, line_no);
    auto m = parse_number(f[im], columns.mediator, line_no);
    auto t = parse_number(f[it], columns.time, line_no);
    std::vector<double> cov(icov.size());
    bool cov_missing = false;
    for (std::size_t j = 0; j < icov.size(); ++j) {
      auto v = parse_number(f[icov[j]], columns.covariates[j], line_no);
      if (!v) {
        cov_missing = true;
      } else {
        cov[j] = *v;
      }
    }
    if (!y || !d || !m || !t || cov_missing) {
      ++data.dropped_rows;
      continue;
    }
    auto binary = [&](double v, const std::string& column) -> std::uint8_t {
      if (v != 0.0 && v != 1.0) {
        fail(errc::non_binary_code, "line " + std::to_string(line_no) + ": column '" + column +
                                        "' must be 0 or 1, found " + std::to_string(v));
      }
      return v == 1.0 ? 1 : 0;
    };

    Observation o;
    o.y = *y;
    o.d = binary(*d, columns.treatment);
    o.m = binary(*m, columns.mediator);
    o.t = binary(*t, columns.time);
    if (has_cluster) {
      const std::string& key = f[icl];
      auto [pos, inserted] = cluster_ids.try_emplace(key, static_cast<std::int32_t>(data.cluster_labels.size()));
      if (inserted) data.cluster_labels.push_back(key);
      o.cluster = pos->second;
    } else {
      o.cluster = static_cast<std::int32_t>(data.cluster_labels.size());
      data.cluster_labels.push_back(std::to_string(data.rows.size() + 1));
    }
    for (std::size_t j = 0; j < icov.size(); ++j) data.covariate_cols[j].push_back(cov[j]);
    data.rows.push_back(o);
  }

  if (data.rows.empty()) fail(errc::empty_group, "no usable rows after dropping missing values");
  validate_design(data);
  partition_cells(data);  // enforces cell occupancy up front
  return data;
}

Dataset load_csv_file(const std::string& path, const ColumnSpec& columns, StudyDesign design) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_config, "cannot open input file '" + path + "'");
  return load_csv(in, columns, design);
}

}  // namespace cic
