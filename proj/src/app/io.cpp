#include "fpl/app/io.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fpl/binary_io.hpp"
#include "fpl/error.hpp"

namespace fpl::app {

namespace {

constexpr char kSnapshotMagic[4] = {'F', 'P', 'L', 'S'};
constexpr std::uint32_t kSnapshotVersion = 1;
constexpr std::size_t kHeaderBytes = 64;

}  // namespace

void write_csv_header(std::ostream& out) {
  const auto names = DiagnosticsRecord::names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& record) {
  std::ostringstream row;
  row.imbue(std::locale::classic());
  row << std::setprecision(17);
  const auto values = record.values();
  for (std::size_t i = 0; i < values.size(); ++i) row << (i ? "," : "") << values[i];
  row << '\n';
  out << row.str();
}

std::size_t DiagnosticsTable::rows() const {
  return names.empty() ? 0 : columns.at(names.front()).size();
}

const std::vector<double>& DiagnosticsTable::column(const std::string& name) const {
  const auto it = columns.find(name);
  if (it == columns.end()) throw FormatError("diagnostics CSV has no column '" + name + "'");
  return it->second;
}

DiagnosticsTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  DiagnosticsTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) {
      table.names.push_back(name);
      table.columns[name];
    }
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      if (col >= table.names.size())
        throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": too many fields");
      std::istringstream num(cell);
      num.imbue(std::locale::classic());
      double v = 0.0;
      if (!(num >> v)) {
        // Streams reject "nan" and "inf"; accept what operator<< writes.
        if (cell == "nan" || cell == "-nan") v = NAN;
        else if (cell == "inf") v = INFINITY;
        else if (cell == "-inf") v = -INFINITY;
        else throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      table.columns[table.names[col++]].push_back(v);
    }
    if (col != table.names.size())
      throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": expected " +
                        std::to_string(table.names.size()) + " fields, got " + std::to_string(col));
  }
  return table;
}

void save_snapshot(const std::filesystem::path& path, const VelocityField& g, double t,
                   std::int64_t step) {
  ByteWriter payload;
  payload.put_f64_span({g.values.data(), std::size_t(g.values.size())});
  ByteWriter w;
  w.put_bytes({kSnapshotMagic, 4});
  w.put_u32(kSnapshotVersion);
  w.put_u64(std::uint64_t(g.grid.n()));
  w.put_f64(g.grid.half_length());
  w.put_f64(t);
  w.put_u64(std::uint64_t(step));
  w.put_u64(fnv1a64(payload.bytes()));
  w.put_u64(0);
  w.put_u64(0);
  w.put_bytes(payload.bytes());
  write_file_atomic(path, w.bytes());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const std::string where = "snapshot " + path.string() + ": ";
  if (bytes.size() < kHeaderBytes) throw FormatError(where + "header truncated");
  ByteReader r(bytes);
  if (r.get_bytes(4) != std::string_view(kSnapshotMagic, 4)) throw FormatError(where + "bad magic");
  if (r.get_u32() != kSnapshotVersion) throw FormatError(where + "unsupported version");
  const std::uint64_t n = r.get_u64();
  const double L = r.get_f64();
  const double t = r.get_f64();
  const auto step = std::int64_t(r.get_u64());
  const std::uint64_t checksum = r.get_u64();
  r.get_u64();
  r.get_u64();
  if (n < 2 || n > 4096 || n % 2 != 0 || !(L > 0.0)) throw FormatError(where + "bad grid in header");
  const GridSpec grid(int(n), L);
  const std::size_t expected = kHeaderBytes + 8 * std::size_t(grid.size());
  if (bytes.size() != expected)
    throw FormatError(where + "payload length " + std::to_string(bytes.size() - kHeaderBytes) +
                      " bytes, expected " + std::to_string(expected - kHeaderBytes));
  if (fnv1a64(std::string_view(bytes).substr(kHeaderBytes)) != checksum)
    throw FormatError(where + "checksum mismatch");
  Snapshot s{VelocityField(grid), t, step};
  r.get_f64_span({s.g.values.data(), std::size_t(s.g.values.size())});
  return s;
}

void append_manifest(const std::filesystem::path& dir, const nlohmann::json& entry) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.jsonl", std::ios::app | std::ios::binary);
  if (!out) throw FormatError("cannot append to " + (dir / "manifest.jsonl").string());
  out << entry.dump() << '\n';
  out.flush();
}

std::vector<nlohmann::json> read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.jsonl", std::ios::binary);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::filesystem::path cache_dir(const std::filesystem::path& fallback) {
  const char* env = std::getenv("FPL_CACHE_DIR");
  if (env && *env) return env;
  return fallback / "cache";
}

std::string table_file_name(const GridSpec& grid, const KernelParams& params) {
  ByteWriter key;
  key.put_u64(std::uint64_t(grid.n()));
  key.put_f64(grid.half_length());
  key.put_f64(params.lambda);
  key.put_f64(params.trunc_radius);
  key.put_u64(std::uint64_t(params.quad_points));
  std::ostringstream name;
  name << "weights-N" << grid.n() << "-" << std::hex << std::setw(16) << std::setfill('0')
       << fnv1a64(key.bytes()) << ".fplw";
  return name.str();
}

std::shared_ptr<const WeightTable> cached_table(const std::filesystem::path& dir,
                                                const GridSpec& grid,
                                                const KernelParams& params, bool& hit) {
  const auto path = dir / table_file_name(grid, params);
  if (std::filesystem::exists(path)) {
    try {
      auto t = std::make_shared<const WeightTable>(load_table(path, grid, params));
      hit = true;
      return t;
    } catch (const FormatError&) {
      // Stale or damaged entry; rebuild below.
    }
  }
  hit = false;
  auto t = std::make_shared<const WeightTable>(build_table(grid, params));
  std::filesystem::create_directories(dir);
  save_table(*t, path);
  return t;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace fpl::app
