#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phonon_forge/error.hpp"
#include "phonon_forge/result_table.hpp"

namespace phonon_forge {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return quote(std::get<std::string>(c));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

Cell parse_cell(const std::string& s) {
  std::int64_t i = 0;
  auto [pi_end, pi_ec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (pi_ec == std::errc() && pi_end == s.data() + s.size()) return i;
  if (s == "nan") return std::nan("");
  double d = 0.0;
  auto [pd_end, pd_ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (pd_ec == std::errc() && pd_end == s.data() + s.size()) return d;
  return s;
}

}  // namespace

ResultTable::ResultTable(std::string name, std::vector<Column> schema)
    : name_(std::move(name)), schema_(std::move(schema)) {
  if (schema_.empty()) fail(ErrorCode::validation, "result table '" + name_ + "' needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != schema_.size()) {
    fail(ErrorCode::dimension_mismatch, "row of " + std::to_string(row.size()) + " cells for table '" + name_ +
                                            "' with " + std::to_string(schema_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == name) return i;
  fail(ErrorCode::unknown_label, "table '" + name_ + "' has no column '" + name + "'");
}

bool ResultTable::has_column(const std::string& name) const {
  return std::any_of(schema_.begin(), schema_.end(), [&](const Column& c) { return c.name == name; });
}

double ResultTable::number(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row)[column_index(column)];
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  fail(ErrorCode::validation, "column '" + column + "' holds text");
}

std::string ResultTable::text(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row)[column_index(column)];
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return format_cell(c);
}

void ResultTable::sort_rows(std::size_t key_columns) {
  const std::size_t k = std::min(key_columns, schema_.size());
  auto as_key = [](const Cell& c) -> std::pair<double, std::string> {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return {static_cast<double>(*i), {}};
    if (const auto* d = std::get_if<double>(&c)) return {*d, {}};
    return {0.0, std::get<std::string>(c)};
  };
  std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto ka = as_key(a[i]);
      const auto kb = as_key(b[i]);
      if (ka != kb) return ka < kb;
    }
    return false;
  });
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  os << "# units: omega_m = 1 (frequencies and rates in omega_m, times in omega_m^-1)\n";
  for (std::size_t i = 0; i < schema_.size(); ++i) os << (i ? "," : "") << schema_[i].name << '[' << schema_[i].unit << ']';
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  os << to_csv();
  if (!os) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

void ResultTable::write_metadata(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  nlohmann::json j = meta;
  j["table"] = name_;
  j["rows"] = rows_.size();
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema_) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  j["columns"] = cols;
  os << j.dump(2) << '\n';
  if (!os) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

ResultTable ResultTable::read_csv(const std::filesystem::path& path, std::string name) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::string line;
  std::vector<Column> schema;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (const auto& h : split_csv_line(line)) {
      const auto lb = h.find('[');
      if (lb == std::string::npos || h.back() != ']') {
        schema.push_back({h, "1"});
      } else {
        schema.push_back({h.substr(0, lb), h.substr(lb + 1, h.size() - lb - 2)});
      }
    }
    break;
  }
  if (schema.empty()) fail(ErrorCode::io, "'" + path.string() + "' has no header row");
  ResultTable t(std::move(name), std::move(schema));
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<Cell> row;
    for (const auto& s : split_csv_line(line)) row.push_back(parse_cell(s));
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace phonon_forge
