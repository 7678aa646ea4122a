#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpl/diagnostics.hpp"
#include "fpl/weights.hpp"

namespace fpl::app {

/// Header row naming every DiagnosticsRecord field.
void write_csv_header(std::ostream& out);
/// One row, 17 significant digits, '.' decimal, LF.
void write_csv_row(std::ostream& out, const DiagnosticsRecord& record);

/// Columns of a diagnostics CSV by header name. Throws FormatError on
/// ragged rows or unparsable numbers.
struct DiagnosticsTable {
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> columns;
  std::size_t rows() const;
  const std::vector<double>& column(const std::string& name) const;
};
DiagnosticsTable read_csv(const std::filesystem::path& path);

/// Snapshot file: 64-byte header ("FPLS", version, N, L, t, step, checksum)
/// followed by the N^3 field values as little-endian float64.
struct Snapshot {
  VelocityField g;
  double t = 0.0;
  std::int64_t step = 0;
};
void save_snapshot(const std::filesystem::path& path, const VelocityField& g, double t,
                   std::int64_t step);
Snapshot load_snapshot(const std::filesystem::path& path);

/// Appends one JSON object as a line of <dir>/manifest.jsonl.
void append_manifest(const std::filesystem::path& dir, const nlohmann::json& entry);
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& dir);

/// $FPL_CACHE_DIR, or <fallback>/cache when unset or empty.
std::filesystem::path cache_dir(const std::filesystem::path& fallback);
/// File name of the cached table for a grid and kernel.
std::string table_file_name(const GridSpec& grid, const KernelParams& params);

/// Loads the cached table when present and valid, otherwise builds and
/// stores it. `hit` reports which happened.
std::shared_ptr<const WeightTable> cached_table(const std::filesystem::path& dir,
                                                const GridSpec& grid,
                                                const KernelParams& params, bool& hit);

/// Current time, ISO 8601 UTC.
std::string utc_timestamp();

}  // namespace fpl::app
