#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tightknot {

// One knot's row. Optional fields are written as empty cells.
struct InvariantRecord {
  std::string label;
  std::optional<int> crossing_number;
  std::optional<bool> alternating;
  std::optional<long> vertex_count;
  std::optional<double> ropelength;
  std::optional<double> writhe;  // multi-component: sum of component self-writhes
  std::optional<double> acn;
  std::optional<double> residual;
  std::string termination;
  std::string status;  // ok | topology-changed | error
  std::string error;
  std::string determinant_before;  // '/'-joined per component
  std::string determinant_after;
  std::string config_hash;  // hex
  // External columns, passed through from the manifest.
  std::optional<double> hyperbolic_volume;
  std::optional<double> alexander_at_minus1;
  std::optional<double> rasmussen_s;
  std::optional<double> tau;

  bool operator==(const InvariantRecord&) const = default;
};

using RecordTable = std::vector<InvariantRecord>;

// Comma-separated with a header row; cells quoted when they contain a comma,
// quote or newline. Numbers at 17 significant digits.
std::string write_record_table(const RecordTable& table);
// Columns are matched by header name in any order; unknown columns are
// ignored, and "label" is the only required one.
RecordTable parse_record_table(std::string_view text);
RecordTable read_record_table(const std::filesystem::path& path);
void write_record_table_file(const std::filesystem::path& path, const RecordTable& table);

// Header row plus one line, for appending to an existing table.
std::string record_table_header();
std::string record_row(const InvariantRecord& r);

// Accepts 1/0, true/false, yes/no, y/n, a/n (alternating/non-alternating).
bool parse_flag(std::string_view text);

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  InvariantRecord metadata;    // label, crossing number, flag and external columns
};

// Same dialect as the record table with an extra required "path" column.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base = {});
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Splits one delimited document into rows of cells (RFC 4180 quoting).
std::vector<std::vector<std::string>> parse_delimited(std::string_view text, char sep = ',');

}  // namespace tightknot
