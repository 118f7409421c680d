#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "progeny/error.hpp"

namespace progeny::cli {

// Empty cells are written as nothing between the separators.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;
using Row = std::vector<Cell>;

namespace schema {
inline const std::vector<std::string> trajectory = {"t", "z", "x"};
inline const std::vector<std::string> grid_means = {"t", "mean_z", "se_z", "mean_x", "se_x"};
inline const std::vector<std::string> comparison = {"param", "stat", "sim_mean", "sim_se", "fluid", "rel_diff"};
inline const std::vector<std::string> minimize_curve = {"y2star", "lambda", "t_eps"};
inline const std::vector<std::string> fluid_curve = {"t", "y1", "y2"};
inline const std::vector<std::string> generations = {"generation", "population", "progeny", "sqrt_progeny", "K"};
}  // namespace schema

// 17 significant digits, '.' as decimal separator regardless of locale.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

inline std::string quote_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_cell(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return quote_field(s); }
  } fmt;
  return std::visit(fmt, c);
}

inline std::string render_csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
  if (header.empty()) throw DomainError("CSV schema has no columns");
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += quote_field(header[i]);
  }
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw DomainError("CSV row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " fields, schema has " + std::to_string(header.size()));
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) out += ',';
      out += format_cell(rows[r][i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

inline void write_csv(const std::vector<Row>& rows, const std::vector<std::string>& header,
                      const std::filesystem::path& path) {
  write_text(path, render_csv(header, rows));
}

}  // namespace progeny::cli
