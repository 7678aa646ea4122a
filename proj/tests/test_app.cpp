#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fpl/app/commands.hpp"
#include "fpl/app/config.hpp"
#include "fpl/app/io.hpp"
#include "fpl/app/suites.hpp"
#include "test_support.hpp"

using namespace fpl;
using namespace fpl::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  static const fs::path root = [] {
    std::random_device rd;
    const fs::path p = fs::temp_directory_path() / ("fpl-test-" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  const fs::path p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Renders the echo as INI so it can be parsed again.
std::string echo_to_ini(const RunConfig& cfg) {
  std::map<std::string, std::string> sections;
  for (const auto& [key, value] : cfg.echo()) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
    if (name.ends_with("_auto")) continue;
    sections[section] += name + " = " + value + "\n";
  }
  std::string out;
  for (const auto& [s, body] : sections) out += "[" + s + "]\n" + body;
  return out;
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args, const fs::path& dir) {
  const char* exe = std::getenv("FPL_CLI");
  REQUIRE(exe != nullptr);
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(exe) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), read_file(log)};
}

DiagnosticsRecord record_at(double t, double dist, double h) {
  DiagnosticsRecord r{};
  r.t = t;
  r.dist_to_eq = dist;
  r.entropy = h;
  r.mass = 1.0;
  r.energy = 3.0;
  return r;
}

}  // namespace

TEST_CASE("config defaults, overrides and auto values") {
  const RunConfig d = parse_config("");
  CHECK(d.solver.n_modes == 16);
  CHECK(d.solver.lambda == 1.0);
  CHECK(d.solver.padding);
  CHECK(d.auto_half_length);
  CHECK(d.solver.half_length == doctest::Approx(d.initial.auto_half_length(d.tail_tol)));
  CHECK(d.initial.kind == InitialCondition::Kind::bi_maxwellian);

  const RunConfig c = parse_config(
      "[grid]\nn_modes = 12\nhalf_length = 4.5\n"
      "[kernel]\nlambda = 0.5\ntrunc_radius = auto\n"
      "[time]\ndt = 0.01\nt_final = 0.2\noutput_stride = 3\n"
      "[solver]\npadding = off\ncutoff = smoothstep\n"
      "[initial]\nkind = perturbed\nV0 = 0.5 -0.25 0\nT0 = 2\namplitude = 0.1\n"
      "[run]\nseed = 17\n");
  CHECK(c.solver.n_modes == 12);
  CHECK(c.solver.half_length == 4.5);
  CHECK_FALSE(c.auto_half_length);
  CHECK(c.solver.lambda == 0.5);
  CHECK(c.solver.kernel().trunc_radius == doctest::Approx(2.25));
  CHECK(c.solver.dt == 0.01);
  CHECK(c.solver.output_stride == 3);
  CHECK_FALSE(c.solver.padding);
  CHECK(c.solver.cutoff.mode == CutoffFunction::Mode::smoothstep);
  CHECK(c.initial.kind == InitialCondition::Kind::perturbed);
  CHECK(c.initial.V0[1] == -0.25);
  CHECK(c.solver.rng_seed == 17);

  // The echo is complete: parsing it back reproduces every setting.
  const RunConfig again = parse_config(echo_to_ini(c));
  CHECK(again.echo() == c.echo());
}

TEST_CASE("config errors are usage errors") {
  CHECK_THROWS_AS(parse_config("[grid]\nn_points = 8\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[mesh]\nn = 8\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[grid]\nn_modes = eight\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[grid]\nn_modes = 7\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[initial]\nV0 = 1 2\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[initial]\nkind = kappa\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[solver]\ncutoff = hann\n"), UsageError);
  try {
    parse_config("[kernel]\nlambda = -3\n");
    FAIL("accepted lambda = -3");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("soft potentials out of scope") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/fpl.ini"), UsageError);
}

TEST_CASE("initial conditions carry the requested moments") {
  const GridSpec g(24, 6.0);
  for (auto kind : {InitialCondition::Kind::maxwellian, InitialCondition::Kind::bi_maxwellian}) {
    InitialCondition ic;
    ic.kind = kind;
    ic.rho0 = 1.3;
    ic.V0 = {0.2, 0.0, -0.1};
    ic.T0 = 1.1;
    const Moments m = moments(ic.sample(g, 0));
    CHECK(m.rho == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(m.V[0] == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(m.V[2] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(m.T == doctest::Approx(1.1).epsilon(1e-5));
  }
  InitialCondition p;
  p.kind = InitialCondition::Kind::perturbed;
  const VelocityField a = p.sample(g, 3), b = p.sample(g, 3), c = p.sample(g, 4);
  CHECK((a.values == b.values).all());
  CHECK_FALSE((a.values == c.values).all());
  CHECK(a.values.minCoeff() >= 0.0);
  const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
  CHECK(((a.values - M.values).abs() <= 0.2 * M.values + 1e-300).all());
}

TEST_CASE("diagnostics CSV round trip") {
  const fs::path dir = scratch("csv");
  const GridSpec g(8, 4.0);
  const VelocityField f = fpl::testing::gaussian(g, 1.0, {0.1, 0, 0}, 0.9);
  const VelocityField eq = maxwellian_field(equilibrium_of(f), g);
  std::vector<DiagnosticsRecord> recs;
  {
    std::ofstream out(dir / "d.csv", std::ios::binary);
    write_csv_header(out);
    for (int i = 0; i < 3; ++i) {
      recs.push_back(make_record(f, 0.1 * i + 1.0 / 3.0, i, eq, 1e-9 * i, 1e-7, {}));
      write_csv_row(out, recs.back());
    }
  }
  const std::string text = read_file(dir / "d.csv");
  CHECK(text.find('\r') == std::string::npos);
  const DiagnosticsTable t = read_csv(dir / "d.csv");
  REQUIRE(t.rows() == 3);
  CHECK(t.names == DiagnosticsRecord::names());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto values = recs[i].values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double got = t.columns.at(t.names[k])[i];
      if (std::isnan(values[k]))
        CHECK(std::isnan(got));
      else
        CHECK(got == values[k]);  // 17 digits round-trip exactly
    }
  }
  write_file(dir / "ragged.csv", "t,step\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(dir / "ragged.csv"), FormatError);
  write_file(dir / "junk.csv", "t,step\n1,abc\n");
  CHECK_THROWS_AS(read_csv(dir / "junk.csv"), FormatError);
}

TEST_CASE("snapshots reload bit-exactly and detect tampering") {
  const fs::path dir = scratch("snap");
  const GridSpec g(8, 3.5);
  const VelocityField f = fpl::testing::random_field(g, 11, -1.0, 2.0);
  save_snapshot(dir / "s.fpls", f, 0.125, 42);
  const Snapshot s = load_snapshot(dir / "s.fpls");
  CHECK(s.g.grid == g);
  CHECK((s.g.values == f.values).all());
  CHECK(s.t == 0.125);
  CHECK(s.step == 42);
  CHECK(fs::file_size(dir / "s.fpls") == 64 + 8 * std::uintmax_t(g.size()));

  std::string bytes = read_file(dir / "s.fpls");
  bytes[64 + 100] ^= 0x01;
  write_file(dir / "t.fpls", bytes);
  CHECK_THROWS_AS(load_snapshot(dir / "t.fpls"), FormatError);

  bytes = read_file(dir / "s.fpls");
  bytes[0] = 'X';
  write_file(dir / "m.fpls", bytes);
  CHECK_THROWS_AS(load_snapshot(dir / "m.fpls"), FormatError);

  write_file(dir / "short.fpls", read_file(dir / "s.fpls").substr(0, 100));
  CHECK_THROWS_AS(load_snapshot(dir / "short.fpls"), FormatError);
  write_file(dir / "header.fpls", read_file(dir / "s.fpls").substr(0, 30));
  CHECK_THROWS_AS(load_snapshot(dir / "header.fpls"), FormatError);
}

TEST_CASE("manifest is append-only JSON lines") {
  const fs::path dir = scratch("manifest");
  append_manifest(dir, {{"event", "start"}, {"n", 1}});
  append_manifest(dir, {{"event", "end"}, {"exit_status", 0}});
  const auto entries = read_manifest(dir);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0]["event"] == "start");
  CHECK(entries[1]["exit_status"] == 0);
  const std::string text = read_file(dir / "manifest.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("weight cache: miss, hit, and rebuild of a damaged entry") {
  const fs::path dir = scratch("cache");
  const GridSpec g(8, 3.0);
  const KernelParams p{1.0, 1.5, 64};
  bool hit = true;
  const auto a = cached_table(dir, g, p, hit);
  CHECK_FALSE(hit);
  const auto b = cached_table(dir, g, p, hit);
  CHECK(hit);
  CHECK(table_checksum(*a) == table_checksum(*b));

  // Different kernel, different file.
  CHECK(table_file_name(g, p) != table_file_name(g, {0.5, 1.5, 64}));
  CHECK(table_file_name(g, p) != table_file_name(GridSpec(8, 3.5), p));

  const fs::path file = dir / table_file_name(g, p);
  std::string bytes = read_file(file);
  bytes[bytes.size() - 3] ^= 0x10;
  write_file(file, bytes);
  const auto c = cached_table(dir, g, p, hit);
  CHECK_FALSE(hit);
  CHECK(table_checksum(*c) == table_checksum(*a));

  ::setenv("FPL_CACHE_DIR", "/tmp/fpl-cache-env", 1);
  CHECK(cache_dir("/somewhere") == fs::path("/tmp/fpl-cache-env"));
  ::unsetenv("FPL_CACHE_DIR");
  CHECK(cache_dir("/somewhere") == fs::path("/somewhere/cache"));
}

TEST_CASE("analysis of a synthetic exponential decay") {
  const double rate = 0.7;
  DiagnosticsTable t;
  t.names = DiagnosticsRecord::names();
  for (int i = 0; i <= 40; ++i) {
    const double time = 0.05 * i;
    const auto v = record_at(time, 0.3 * std::exp(-rate * time), -1.0 - 0.01 * i).values();
    for (std::size_t k = 0; k < v.size(); ++k) t.columns[t.names[k]].push_back(v[k]);
  }
  const Analysis a = analyze(t);
  CHECK(a.records == 41);
  CHECK(a.half_life == doctest::Approx(std::log(2.0) / rate).epsilon(0.01));
  CHECK(a.decay_rate == doctest::Approx(rate).epsilon(1e-10));
  CHECK(a.entropy_violations == 0);
  CHECK(a.mass_drift == 0.0);
  CHECK(a.final_distance == doctest::Approx(0.3 * std::exp(-2.0 * rate)));

  // One entropy increase above the threshold, one below it.
  t.columns["entropy"][10] = t.columns["entropy"][9] + 1e-6;
  t.columns["entropy"][20] = t.columns["entropy"][19] + 1e-10;
  CHECK(analyze(t).entropy_violations == 1);

  DiagnosticsTable empty;
  empty.names = DiagnosticsRecord::names();
  for (const auto& n : empty.names) empty.columns[n];
  try {
    analyze(empty);
    FAIL("empty table accepted");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()) == "no records");
  }
}

TEST_CASE("suite registry") {
  CHECK(suite_names().size() == 8);
  CHECK_THROWS_AS(run_suite("nope", 0), UsageError);
  const SuiteResult r = run_suite("projection", 1);
  CHECK(r.passed);
  CHECK(r.name == "projection");
  CHECK_FALSE(r.summary.empty());
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  write_file(dir / "smoke.ini",
             "[grid]\nn_modes = 8\n[time]\ndt = 0.005\nt_final = 0.05\nsnapshot_stride = 5\n");
  write_file(dir / "bad.ini", "[grid]\nn_modes = 8\n[time]\ndt = 0.05\nt_final = 1\n");
  write_file(dir / "soft.ini", "[kernel]\nlambda = -3\n");
  const std::string cfg = " --config " + (dir / "smoke.ini").string();

  SUBCASE("usage errors") {
    CHECK(cli("", dir).code == 2);
    CHECK(cli("run", dir).code == 2);
    CHECK(cli("frobnicate", dir).code == 2);
    const auto soft = cli("precompute --config " + (dir / "soft.ini").string() + " --out " +
                              (dir / "p").string(),
                          dir);
    CHECK(soft.code == 2);
    CHECK(soft.out.find("soft potentials out of scope") != std::string::npos);
    const auto unknown = cli("verify --suite nope", dir);
    CHECK(unknown.code == 2);
    CHECK(unknown.out.find("relaxation") != std::string::npos);
  }

  SUBCASE("precompute twice hits the cache") {
    const std::string out = " --out " + (dir / "pre").string();
    const auto first = cli("precompute" + cfg + out, dir);
    CHECK(first.code == 0);
    CHECK(first.out.find("built") != std::string::npos);
    const auto second = cli("precompute" + cfg + out, dir);
    CHECK(second.code == 0);
    CHECK(second.out.find("cache hit") != std::string::npos);
    const auto m = read_manifest(dir / "pre");
    REQUIRE(m.size() == 2);
    CHECK(m[0]["table_checksum"] == m[1]["table_checksum"]);
    CHECK(m[1]["cache_hit"] == true);
  }

  SUBCASE("smoke run, audit, snapshots, analyze") {
    const fs::path run = dir / "run";
    const auto r = cli("run" + cfg + " --out " + run.string(), dir);
    CHECK(r.code == 0);
    const auto pos = r.out.find("max moment drift ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 17)) <= 1e-10);

    const DiagnosticsTable t = read_csv(run / "diagnostics.csv");
    CHECK(t.rows() == 11);
    CHECK(t.column("t").back() == doctest::Approx(0.05));

    const auto m = read_manifest(run);
    REQUIRE(m.size() == 2);
    CHECK(m[0]["event"] == "start");
    CHECK(m[0]["config"]["grid.n_modes"] == "8");
    CHECK(m[1]["exit_status"] == 0);
    CHECK(m[1]["artifacts"].size() == 4);  // CSV and snapshots at steps 0, 5, 10

    const Snapshot last = load_snapshot(run / "snapshots" / "step-00000010.fpls");
    CHECK(last.step == 10);
    CHECK(last.t == doctest::Approx(0.05));

    const auto a = cli("analyze --out " + run.string(), dir);
    CHECK(a.code == 0);
    CHECK(a.out.find("entropy violations   0") != std::string::npos);

    // Same seed, same bits.
    const fs::path again = dir / "again";
    CHECK(cli("run" + cfg + " --out " + again.string(), dir).code == 0);
    CHECK(read_file(again / "snapshots" / "step-00000010.fpls") ==
          read_file(run / "snapshots" / "step-00000010.fpls"));
  }

  SUBCASE("stability breach halts with exit 4") {
    const fs::path run = dir / "halt";
    const auto r = cli("run --config " + (dir / "bad.ini").string() + " --out " + run.string(), dir);
    CHECK(r.code == 4);
    const auto m = read_manifest(run);
    REQUIRE(m.size() == 2);
    CHECK(m[1]["exit_status"] == 4);
    CHECK(m[1]["halt_time"].get<double>() > 0.0);
  }

  SUBCASE("analyze of an empty run directory") {
    const fs::path empty = dir / "empty";
    fs::create_directories(empty);
    write_csv_header(*std::make_unique<std::ofstream>(empty / "diagnostics.csv"));
    const auto r = cli("analyze --out " + empty.string(), dir);
    CHECK(r.code == 3);
    CHECK(r.out.find("no records") != std::string::npos);
  }
}
