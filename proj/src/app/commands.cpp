#include "fpl/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fpl/app/config.hpp"
#include "fpl/app/suites.hpp"
#include "fpl/dynamics.hpp"

namespace fpl::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "fpl 0.1.0";

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [key, value] : cfg.echo()) j[key] = value;
  return j;
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << x;
  return s.str();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Maps library errors to the exit-code contract.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const StabilityHalt& e) {
    err << "halted: " << e.what() << "\n";
    return exit_halted;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

RunConfig load(const CommandOptions& opts) {
  if (opts.config.empty()) throw UsageError("--config is required");
  RunConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.solver.rng_seed = *opts.seed;
  return cfg;
}

}  // namespace

int cmd_precompute(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(opts);
    const GridSpec grid = cfg.solver.grid();
    const KernelParams params = cfg.solver.kernel();
    const fs::path dir = cache_dir(opts.out);
    bool hit = false;
    const auto table = cached_table(dir, grid, params, hit);
    const fs::path file = dir / table_file_name(grid, params);
    const std::string checksum = hex(table_checksum(*table));
    out << (hit ? "cache hit: " : "built: ") << file.string() << "\n"
        << "checksum " << checksum << "\n";
    append_manifest(opts.out, {{"command", "precompute"},
                               {"version", kVersion},
                               {"time", utc_timestamp()},
                               {"config", config_json(cfg)},
                               {"table", file.string()},
                               {"table_checksum", checksum},
                               {"cache_hit", hit},
                               {"exit_status", 0}});
    return int(exit_ok);
  });
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load(opts);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  const fs::path dir = opts.out;
  const fs::path csv_path = dir / "diagnostics.csv";
  const fs::path snap_dir = dir / "snapshots";
  json end = {{"event", "end"}};
  json artifacts = json::array();
  const auto started = utc_timestamp();

  const int code = guarded(err, [&] {
    fs::create_directories(snap_dir);
    const GridSpec grid = cfg.solver.grid();
    bool hit = false;
    const auto table = cached_table(cache_dir(dir), grid, cfg.solver.kernel(), hit);
    const std::string checksum = hex(table_checksum(*table));
    append_manifest(dir, {{"event", "start"},
                          {"command", "run"},
                          {"version", kVersion},
                          {"time", started},
                          {"config", config_json(cfg)},
                          {"table_checksum", checksum},
                          {"cache_hit", hit}});

    const VelocityField g0 = cfg.initial.sample(grid, cfg.solver.rng_seed);
    SolverConfig sc = cfg.solver;
    if (sc.dt <= 0.0) sc.dt = default_time_step(grid, sc.kernel(), g0);
    Solver solver(sc, table);
    out << "N = " << grid.n() << "  L = " << grid.half_length() << "  R = " << sc.kernel().trunc_radius
        << "  dt = " << sc.dt << "  t_final = " << sc.t_final << "\n";

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw FormatError("cannot write " + csv_path.string());
    write_csv_header(csv);
    artifacts.push_back(csv_path.string());

    // Drift of each invariant against its initial value; momentum is scaled
    // by sqrt(mass * energy) since it may start at zero.
    double m0 = 0, p0[3] = {0, 0, 0}, e0 = 0;
    double drift[3] = {0, 0, 0};
    bool first = true;
    const DiagnosticsSink sink = [&](const DiagnosticsRecord& rec) {
      write_csv_row(csv, rec);
      csv.flush();
      if (first) {
        m0 = rec.mass;
        e0 = rec.energy;
        for (int j = 0; j < 3; ++j) p0[j] = rec.momentum[j];
        first = false;
      }
      const double pscale = std::sqrt(std::abs(m0 * e0));
      drift[0] = std::max(drift[0], std::abs(rec.mass - m0) / std::abs(m0));
      for (int j = 0; j < 3; ++j)
        drift[1] = std::max(drift[1], std::abs(rec.momentum[j] - p0[j]) / pscale);
      drift[2] = std::max(drift[2], std::abs(rec.energy - e0) / std::abs(e0));
    };

    std::int64_t last_saved = -1;
    const auto snapshot = [&](const SolverState& s) {
      char name[40];
      std::snprintf(name, sizeof name, "step-%08lld.fpls", static_cast<long long>(s.step_index));
      save_snapshot(snap_dir / name, s.g, s.t, s.step_index);
      artifacts.push_back((snap_dir / name).string());
      last_saved = s.step_index;
    };
    const StateObserver observer = [&](const SolverState& s) {
      if (s.step_index == 0 || (cfg.snapshot_stride > 0 && s.step_index % cfg.snapshot_stride == 0))
        snapshot(s);
    };

    const SolverState final_state = [&] {
      try {
        return solver.run(g0, sink, observer);
      } catch (const StabilityHalt& e) {
        end["halt_time"] = e.time();
        end["halt_ratio"] = e.ratio();
        throw;
      }
    }();
    if (final_state.step_index != last_saved) snapshot(final_state);

    const double worst = std::max({drift[0], drift[1], drift[2]});
    out << "conservation audit: max moment drift " << sci(worst) << " (mass " << sci(drift[0])
        << ", momentum " << sci(drift[1]) << ", energy " << sci(drift[2]) << ")\n";
    out << "final t = " << final_state.t << "  steps = " << final_state.step_index
        << "  ||g - M||_2 = " << sci(final_state.diagnostics.dist_to_eq) << "\n";
    end["max_drift"] = worst;
    end["steps"] = final_state.step_index;
    end["t_final"] = final_state.t;
    if (worst > 1e-10) {
      err << "error: conservation audit failed (drift " << sci(worst) << " > 1e-10)\n";
      return int(exit_numerical);
    }
    return int(exit_ok);
  });

  end["time"] = utc_timestamp();
  end["exit_status"] = code;
  end["artifacts"] = artifacts;
  try {
    append_manifest(dir, end);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << "\n";
  }
  return code;
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (opts.suite.empty() || opts.suite == "all") {
    names = suite_names();
  } else {
    names.push_back(opts.suite);
  }
  for (const auto& name : names) {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      err << "error: unknown suite '" << name << "'; available: " << list << "\n";
      return exit_usage;
    }
  }
  const std::uint64_t seed = opts.seed.value_or(0);
  bool all = true;
  std::vector<SuiteResult> results;
  for (const auto& name : names) {
    out << "[" << name << "]\n" << std::flush;
    results.push_back(run_suite(name, seed, &out));
    const SuiteResult& r = results.back();
    for (const auto& d : r.details) out << "  " << d << "\n";
    all = all && r.passed;
  }
  out << "\n";
  for (const auto& r : results) {
    char secs[16];
    std::snprintf(secs, sizeof secs, "%7.1fs", r.seconds);
    out << std::left << std::setw(14) << r.name << (r.passed ? "PASS  " : "FAIL  ") << secs << "  "
        << r.summary << "\n";
  }
  return all ? exit_ok : exit_numerical;
}

Analysis analyze(const DiagnosticsTable& table) {
  const std::size_t n = table.rows();
  if (n == 0) throw FormatError("no records");
  Analysis a;
  a.records = n;
  const auto& t = table.column("t");
  const auto& dist = table.column("dist_to_eq");
  const auto& h = table.column("entropy");
  const auto& mass = table.column("mass");
  const auto& energy = table.column("energy");
  const auto& neg = table.column("neg_ratio");

  // ln ||g - M|| = c - rate t by least squares over the positive samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dist[i] > 0.0) || !std::isfinite(dist[i])) continue;
    const double y = std::log(dist[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    syy += y * y;
    ++used;
  }
  if (used >= 2) {
    const double u = double(used);
    const double vx = u * sxx - sx * sx, vy = u * syy - sy * sy, cxy = u * sxy - sx * sy;
    if (vx > 0.0) {
      a.decay_rate = -cxy / vx;
      a.half_life = a.decay_rate > 0.0 ? std::log(2.0) / a.decay_rate : INFINITY;
      a.fit_r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    }
  }

  const double pscale = std::sqrt(std::abs(mass[0] * energy[0]));
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double inc = h[i] - h[i - 1];
      a.max_entropy_increase = i == 1 ? inc : std::max(a.max_entropy_increase, inc);
      if (inc > 1e-8) ++a.entropy_violations;
    }
    a.mass_drift = std::max(a.mass_drift, std::abs(mass[i] - mass[0]) / std::abs(mass[0]));
    a.energy_drift = std::max(a.energy_drift, std::abs(energy[i] - energy[0]) / std::abs(energy[0]));
    for (const char* c : {"momentum1", "momentum2", "momentum3"}) {
      const auto& p = table.column(c);
      a.momentum_drift = std::max(a.momentum_drift, std::abs(p[i] - p[0]) / pscale);
    }
    a.max_neg_ratio = std::max(a.max_neg_ratio, neg[i]);
  }
  a.final_distance = dist[n - 1];
  return a;
}

int cmd_analyze(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fs::path csv = opts.out;
    if (fs::is_directory(csv)) csv /= "diagnostics.csv";
    if (!fs::exists(csv)) throw UsageError("no diagnostics CSV at " + csv.string());
    const Analysis a = analyze(read_csv(csv));
    out << "records              " << a.records << "\n"
        << "decay rate           " << sci(a.decay_rate) << "  (fit r^2 " << a.fit_r2 << ")\n"
        << "half-life            " << sci(a.half_life) << "\n"
        << "final ||g - M||_2    " << sci(a.final_distance) << "\n"
        << "entropy violations   " << a.entropy_violations << "  (max increase "
        << sci(a.max_entropy_increase) << ")\n"
        << "drift mass           " << sci(a.mass_drift) << "\n"
        << "drift momentum       " << sci(a.momentum_drift) << "\n"
        << "drift energy         " << sci(a.energy_drift) << "\n"
        << "max neg ratio        " << sci(a.max_neg_ratio) << "\n";
    return int(exit_ok);
  });
}

}  // namespace fpl::app
