#include "tightknot/records.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tightknot/errors.hpp"
#include "tightknot/io.hpp"

namespace tightknot {

namespace {

// Column order of written tables.
constexpr std::string_view kColumns[] = {
    "label",           "crossing_number",    "alternating",  "vertex_count", "ropelength",
    "writhe",          "acn",                "residual",     "termination",  "status",
    "error",           "determinant_before", "determinant_after", "config_hash",
    "hyperbolic_volume", "alexander_at_minus1", "rasmussen_s", "tau"};

std::string quote(std::string_view cell) {
  const bool plain = cell.find_first_of(",\"\n\r") == std::string_view::npos &&
                     (cell.empty() || cell.front() != '#');
  if (plain) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

struct Cells {
  const std::map<std::string, std::size_t>& index;
  const std::vector<std::string>& row;
  std::size_t line;

  const std::string* get(const std::string& name) const {
    const auto it = index.find(name);
    if (it == index.end() || it->second >= row.size()) return nullptr;
    return row[it->second].empty() ? nullptr : &row[it->second];
  }
  std::string text(const std::string& name) const {
    const auto* s = get(name);
    return s ? *s : std::string();
  }
  [[noreturn]] void fail(const std::string& name, const std::string& why) const {
    throw Error(ErrorKind::kParse,
                "row " + std::to_string(line) + ", column '" + name + "': " + why);
  }
  std::optional<double> real(const std::string& name) const {
    const auto* s = get(name);
    if (!s) return std::nullopt;
    double v = 0.0;
    try {
      v = parse_real(trim(*s));
    } catch (const Error& e) {
      fail(name, e.what());
    }
    if (!std::isfinite(v)) fail(name, "non-finite value");
    return v;
  }
  template <class T>
  std::optional<T> integer(const std::string& name) const {
    const auto v = real(name);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v)) fail(name, "expected an integer");
    return static_cast<T>(*v);
  }
  std::optional<bool> flag(const std::string& name) const {
    const auto* s = get(name);
    if (!s) return std::nullopt;
    try {
      return parse_flag(trim(*s));
    } catch (const Error& e) {
      fail(name, e.what());
    }
  }
};

InvariantRecord read_record(const Cells& c) {
  InvariantRecord r;
  r.label = c.text("label");
  r.crossing_number = c.integer<int>("crossing_number");
  r.alternating = c.flag("alternating");
  r.vertex_count = c.integer<long>("vertex_count");
  r.ropelength = c.real("ropelength");
  r.writhe = c.real("writhe");
  r.acn = c.real("acn");
  r.residual = c.real("residual");
  r.termination = c.text("termination");
  r.status = c.text("status");
  r.error = c.text("error");
  r.determinant_before = c.text("determinant_before");
  r.determinant_after = c.text("determinant_after");
  r.config_hash = c.text("config_hash");
  r.hyperbolic_volume = c.real("hyperbolic_volume");
  r.alexander_at_minus1 = c.real("alexander_at_minus1");
  r.rasmussen_s = c.real("rasmussen_s");
  r.tau = c.real("tau");
  return r;
}

// Header index plus data rows; throws when a required column is absent.
template <class F>
void for_each_row(std::string_view text, const std::vector<std::string>& required, F&& f) {
  const auto rows = parse_delimited(text);
  if (rows.empty()) throw Error(ErrorKind::kParse, "missing header row");
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < rows[0].size(); ++k) index.emplace(lower(trim(rows[0][k])), k);
  for (const auto& name : required)
    if (!index.count(name)) throw Error(ErrorKind::kParse, "missing column '" + name + "'");
  for (std::size_t r = 1; r < rows.size(); ++r) f(Cells{index, rows[r], r + 1});
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

bool parse_flag(std::string_view text) {
  const std::string t = lower(text);
  if (t == "1" || t == "true" || t == "yes" || t == "y" || t == "a") return true;
  if (t == "0" || t == "false" || t == "no" || t == "n") return false;
  throw Error(ErrorKind::kParse, "bad flag '" + std::string(text) + "'");
}

std::vector<std::vector<std::string>> parse_delimited(std::string_view text, char sep) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;  // current line has content
  bool comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (comment) {
      if (c == '\n') comment = false;
      continue;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '#' && !any) {
      comment = true;
    } else if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == sep) {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      if (c != ' ' && c != '\t') any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::kParse, "unterminated quoted cell");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string record_table_header() {
  std::string out;
  for (const auto& c : kColumns) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string record_row(const InvariantRecord& r) {
  const std::string cells[] = {
      quote(r.label),
      r.crossing_number ? std::to_string(*r.crossing_number) : "",
      r.alternating ? (*r.alternating ? "1" : "0") : "",
      r.vertex_count ? std::to_string(*r.vertex_count) : "",
      opt(r.ropelength),
      opt(r.writhe),
      opt(r.acn),
      opt(r.residual),
      quote(r.termination),
      quote(r.status),
      quote(r.error),
      quote(r.determinant_before),
      quote(r.determinant_after),
      quote(r.config_hash),
      opt(r.hyperbolic_volume),
      opt(r.alexander_at_minus1),
      opt(r.rasmussen_s),
      opt(r.tau)};
  std::string out;
  for (std::size_t k = 0; k < std::size(cells); ++k) {
    if (k) out += ',';
    out += cells[k];
  }
  return out + '\n';
}

std::string write_record_table(const RecordTable& table) {
  std::string out = record_table_header();
  for (const auto& r : table) out += record_row(r);
  return out;
}

RecordTable parse_record_table(std::string_view text) {
  RecordTable table;
  for_each_row(text, {"label"}, [&](const Cells& c) { table.push_back(read_record(c)); });
  return table;
}

RecordTable read_record_table(const std::filesystem::path& path) {
  try {
    return parse_record_table(slurp(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_record_table_file(const std::filesystem::path& path, const RecordTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  out << write_record_table(table);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "write failed for " + path.string());
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base) {
  std::vector<ManifestEntry> out;
  for_each_row(text, {"path", "label"}, [&](const Cells& c) {
    ManifestEntry e;
    const std::string p = trim(c.text("path"));
    if (p.empty()) c.fail("path", "empty");
    e.path = std::filesystem::path(p);
    if (e.path.is_relative() && !base.empty()) e.path = base / e.path;
    e.metadata = read_record(c);
    if (e.metadata.label.empty()) c.fail("label", "empty");
    out.push_back(std::move(e));
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].metadata.label == out[j].metadata.label)
        throw Error(ErrorKind::kParse, "duplicate label '" + out[i].metadata.label + "'");
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(slurp(path), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace tightknot
