#include "fpl/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace fpl::app {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"n_modes", "half_length", "tail_tol"}},
      {"kernel", {"lambda", "trunc_radius", "quad_points"}},
      {"time", {"dt", "t_final", "output_stride", "snapshot_stride", "epsilon_stability"}},
      {"solver", {"padding", "cutoff", "delta_chi"}},
      {"initial", {"kind", "rho0", "V0", "T0", "separation", "amplitude"}},
      {"run", {"seed"}},
  };
  return keys;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(17);
  s << x;
  return s.str();
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  T get(const std::string& key, T fallback) const {
    const auto node = tree_.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return fallback;
    const std::string text = node->data();
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof())
      throw UsageError("config: cannot parse " + key + " = '" + text + "'");
    return value;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return tree_.get<std::string>(pt::ptree::path_type(key, '.'), fallback);
  }

  // A positive number or "auto" (returned as 0).
  double number_or_auto(const std::string& key, bool& is_auto, double fallback) const {
    const std::string t = text(key, is_auto ? "auto" : fmt(fallback));
    is_auto = t == "auto";
    return is_auto ? 0.0 : get<double>(key, fallback);
  }

  bool flag(const std::string& key, bool fallback) const {
    const std::string t = text(key, fallback ? "on" : "off");
    if (t == "on" || t == "true" || t == "1" || t == "yes") return true;
    if (t == "off" || t == "false" || t == "0" || t == "no") return false;
    throw UsageError("config: " + key + " must be on or off, got '" + t + "'");
  }

 private:
  const pt::ptree& tree_;
};

// Random trigonometric polynomial over the lowest modes, scaled to
// max |p| = 1 on the grid.
Eigen::ArrayXd smooth_noise(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const GridCoordinates x(g);
  Eigen::ArrayXd p = Eigen::ArrayXd::Zero(g.size());
  const double k0 = std::numbers::pi / g.half_length();
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c) {
        const double amp = nd(rng), ph = phase(rng);
        p += amp * (k0 * (a * x.v[0] + b * x.v[1] + c * x.v[2]) + ph).cos();
      }
  return p / p.abs().maxCoeff();
}

}  // namespace

std::string_view to_string(InitialCondition::Kind kind) {
  switch (kind) {
    case InitialCondition::Kind::maxwellian: return "maxwellian";
    case InitialCondition::Kind::bi_maxwellian: return "bi_maxwellian";
    case InitialCondition::Kind::perturbed: return "perturbed";
  }
  return "?";
}

void InitialCondition::validate() const {
  if (!(rho0 > 0.0) || !(T0 > 0.0)) throw UsageError("initial: rho0 and T0 must be positive");
  if (kind == Kind::bi_maxwellian && !(separation * separation < 3.0 * T0))
    throw UsageError("initial: separation^2 must be below 3 T0");
  if (kind == Kind::perturbed && !(amplitude >= 0.0 && amplitude < 1.0))
    throw UsageError("initial: amplitude must lie in [0, 1)");
}

double InitialCondition::auto_half_length(double tail_tol) const {
  validate();
  double shift = std::max({std::abs(V0[0]), std::abs(V0[1]), std::abs(V0[2])});
  double T = T0, stretch = 1.0;
  if (kind == Kind::bi_maxwellian) {
    T = T0 - separation * separation / 3.0;
    shift = std::max(std::abs(V0[0] - separation), std::abs(V0[0] + separation));
    shift = std::max({shift, std::abs(V0[1]), std::abs(V0[2])});
  } else if (kind == Kind::perturbed) {
    stretch = 1.0 + amplitude;
  }
  return choose_domain(rho0, T, stretch, 1.0, tail_tol) + shift;
}

VelocityField InitialCondition::sample(const GridSpec& grid, std::uint64_t seed) const {
  validate();
  switch (kind) {
    case Kind::maxwellian:
      return maxwellian_field({rho0, V0, T0}, grid);
    case Kind::bi_maxwellian: {
      const double Tb = T0 - separation * separation / 3.0;
      const VelocityField a =
          maxwellian_field({0.5 * rho0, {V0[0] + separation, V0[1], V0[2]}, Tb}, grid);
      const VelocityField b =
          maxwellian_field({0.5 * rho0, {V0[0] - separation, V0[1], V0[2]}, Tb}, grid);
      return VelocityField(grid, a.values + b.values);
    }
    case Kind::perturbed: {
      const VelocityField M = maxwellian_field({rho0, V0, T0}, grid);
      return VelocityField(grid, M.values * (1.0 + amplitude * smooth_noise(grid, seed)));
    }
  }
  throw UsageError("initial: unknown kind");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  const SolverConfig& s = solver;
  const KernelParams k = s.kernel();
  return {
      {"grid.n_modes", std::to_string(s.n_modes)},
      {"grid.half_length", fmt(s.half_length)},
      {"grid.half_length_auto", auto_half_length ? "true" : "false"},
      {"grid.tail_tol", fmt(tail_tol)},
      {"kernel.lambda", fmt(k.lambda)},
      {"kernel.trunc_radius", fmt(k.trunc_radius)},
      {"kernel.quad_points", std::to_string(k.quad_points)},
      {"time.dt", s.dt > 0.0 ? fmt(s.dt) : "auto"},
      {"time.t_final", fmt(s.t_final)},
      {"time.output_stride", std::to_string(s.output_stride)},
      {"time.snapshot_stride", std::to_string(snapshot_stride)},
      {"time.epsilon_stability", fmt(s.epsilon_stability)},
      {"solver.padding", s.padding ? "on" : "off"},
      {"solver.cutoff", s.cutoff.mode == CutoffFunction::Mode::identity ? "identity" : "smoothstep"},
      {"solver.delta_chi", fmt(s.cutoff.delta_chi)},
      {"initial.kind", std::string(to_string(initial.kind))},
      {"initial.rho0", fmt(initial.rho0)},
      {"initial.V0", fmt(initial.V0[0]) + " " + fmt(initial.V0[1]) + " " + fmt(initial.V0[2])},
      {"initial.T0", fmt(initial.T0)},
      {"initial.separation", fmt(initial.separation)},
      {"initial.amplitude", fmt(initial.amplitude)},
      {"run.seed", std::to_string(s.rng_seed)},
  };
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.message() + " at line " +
                     std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw UsageError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw UsageError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key))
        throw UsageError("config: unknown key '" + key + "' in [" + section + "]");
  }

  const Reader r(tree);
  RunConfig cfg;
  SolverConfig& s = cfg.solver;
  s.n_modes = r.get<int>("grid.n_modes", 16);
  cfg.tail_tol = r.get<double>("grid.tail_tol", cfg.tail_tol);
  s.half_length = r.number_or_auto("grid.half_length", cfg.auto_half_length, 0.0);

  s.lambda = r.get<double>("kernel.lambda", 1.0);
  bool r_auto = true;
  s.trunc_radius = r.number_or_auto("kernel.trunc_radius", r_auto, 0.0);
  s.quad_points = r.get<int>("kernel.quad_points", 256);

  bool dt_auto = true;
  s.dt = r.number_or_auto("time.dt", dt_auto, 0.0);
  s.t_final = r.get<double>("time.t_final", 1.0);
  s.output_stride = r.get<std::int64_t>("time.output_stride", 1);
  cfg.snapshot_stride = r.get<std::int64_t>("time.snapshot_stride", 0);
  s.epsilon_stability = r.get<double>("time.epsilon_stability", 0.25);

  s.padding = r.flag("solver.padding", true);
  const std::string cutoff = r.text("solver.cutoff", "identity");
  if (cutoff == "identity") {
    s.cutoff.mode = CutoffFunction::Mode::identity;
  } else if (cutoff == "smoothstep") {
    s.cutoff.mode = CutoffFunction::Mode::smoothstep;
  } else {
    throw UsageError("config: solver.cutoff must be identity or smoothstep, got '" + cutoff + "'");
  }
  s.cutoff.delta_chi = r.get<double>("solver.delta_chi", 0.2);

  InitialCondition& ic = cfg.initial;
  const std::string kind = r.text("initial.kind", "bi_maxwellian");
  if (kind == "maxwellian") {
    ic.kind = InitialCondition::Kind::maxwellian;
  } else if (kind == "bi_maxwellian") {
    ic.kind = InitialCondition::Kind::bi_maxwellian;
  } else if (kind == "perturbed") {
    ic.kind = InitialCondition::Kind::perturbed;
  } else {
    throw UsageError("config: initial.kind must be maxwellian, bi_maxwellian or perturbed");
  }
  ic.rho0 = r.get<double>("initial.rho0", ic.rho0);
  ic.T0 = r.get<double>("initial.T0", ic.T0);
  ic.separation = r.get<double>("initial.separation", ic.separation);
  ic.amplitude = r.get<double>("initial.amplitude", ic.amplitude);
  {
    std::istringstream in(r.text("initial.V0", "0 0 0"));
    in.imbue(std::locale::classic());
    if (!(in >> ic.V0[0] >> ic.V0[1] >> ic.V0[2]) || !(in >> std::ws).eof())
      throw UsageError("config: initial.V0 needs three numbers");
  }
  s.rng_seed = r.get<std::uint64_t>("run.seed", 0);

  ic.validate();
  if (cfg.auto_half_length) {
    if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0))
      throw UsageError("config: grid.tail_tol must lie in (0, 1)");
    s.half_length = ic.auto_half_length(cfg.tail_tol);
  }
  if (cfg.snapshot_stride < 0) throw UsageError("config: time.snapshot_stride must be >= 0");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fpl::app
