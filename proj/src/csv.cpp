#include "linemom/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "linemom/errors.hpp"

namespace linemom {

namespace {

struct Table {
  std::vector<std::vector<double>> rows;
  int columns = 0;
};

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  errno = 0;
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (*end != '\0') return false;
  // Subnormal underflow sets ERANGE but the parsed value is usable;
  // only genuine overflow is a parse failure.
  if (errno == ERANGE && std::abs(v) >= 1.0) return false;
  out = v;
  return true;
}

Table read_numeric_csv(const std::string& path, int min_cols, int max_cols) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Table table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      double v = 0.0;
      if (!parse_double(tok, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header line
      throw InputError(path + ":" + std::to_string(line_no) +
                       ": non-numeric field");
    }
    if (static_cast<int>(row.size()) < min_cols ||
        static_cast<int>(row.size()) > max_cols)
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(min_cols) +
                       (max_cols != min_cols
                            ? ".." + std::to_string(max_cols)
                            : "") +
                       " columns, got " + std::to_string(row.size()));
    if (!table.rows.empty() && row.size() != table.rows.front().size())
      throw InputError(path + ":" + std::to_string(line_no) +
                       ": inconsistent column count");
    table.rows.push_back(std::move(row));
  }
  if (table.rows.size() < 2)
    throw InputError(path + ": needs at least two data rows");
  table.columns = static_cast<int>(table.rows.front().size());
  return table;
}

Grid grid_from_x(const std::string& path, const Table& t) {
  const int n = static_cast<int>(t.rows.size());
  const double x0 = t.rows.front()[0];
  const double x1 = t.rows.back()[0];
  if (!(x1 > x0)) throw InputError(path + ": x values must be increasing");
  const double h = (x1 - x0) / (n - 1);
  for (int k = 1; k < n; ++k) {
    const double dx = t.rows[static_cast<size_t>(k)][0] -
                      t.rows[static_cast<size_t>(k - 1)][0];
    if (std::abs(dx - h) > 1e-9 * h)
      throw InputError(path + ":" + std::to_string(k + 1) +
                       ": non-uniform grid step (" + format_double(dx) +
                       " vs " + format_double(h) + ")");
  }
  return Grid(x0, x1, n);
}

std::vector<double> column(const Table& t, int c) {
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& row : t.rows) v.push_back(row[static_cast<size_t>(c)]);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SampledProfile read_profile_csv(const std::string& path, ProfileKind kind) {
  const Table t = read_numeric_csv(path, 2, 2);
  const Grid g = grid_from_x(path, t);
  try {
    return SampledProfile(g, column(t, 1), kind);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_profile_csv(const std::string& path, const SampledProfile& p) {
  std::vector<double> xs(static_cast<size_t>(p.size()));
  for (int k = 0; k < p.size(); ++k) xs[static_cast<size_t>(k)] = p.grid().x(k);
  write_columns_csv(path, {"x", "value"}, {xs, p.values()});
}

TransmissionData read_transmission_csv(const std::string& path) {
  const Table t = read_numeric_csv(path, 2, 3);
  const Grid g = grid_from_x(path, t);
  try {
    if (t.columns == 2) {
      return TransmissionData{SampledProfile(g, column(t, 1),
                                             ProfileKind::density),
                              std::nullopt, std::nullopt};
    }
    SampledProfile f_eta(g, column(t, 1), ProfileKind::density);
    SampledProfile f_ref(g, column(t, 2), ProfileKind::density);
    std::vector<double> ratio(static_cast<size_t>(g.n_points));
    for (int k = 0; k < g.n_points; ++k) {
      if (!(f_ref.value(k) > 0.0))
        throw InputError("reference intensity must be strictly positive");
      ratio[static_cast<size_t>(k)] = f_eta.value(k) / f_ref.value(k);
    }
    return TransmissionData{SampledProfile(g, std::move(ratio),
                                           ProfileKind::density),
                            std::move(f_eta), std::move(f_ref)};
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_columns_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size() || columns.empty())
    throw IoError("column names and data mismatch");
  const size_t rows = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw IoError("ragged columns");

  std::string text;
  for (size_t c = 0; c < names.size(); ++c) {
    if (c) text += ',';
    text += names[c];
  }
  text += '\n';
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) text += ',';
      text += format_double(columns[c][r]);
    }
    text += '\n';
  }
  write_text_file(path, text);
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << text;
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " +
                        ec.message());
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[20];
  std::snprintf(out, sizeof out, "0x%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

}  // namespace linemom
