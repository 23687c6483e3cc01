#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvt/bl_function.hpp"
#include "mvt/errors.hpp"
#include "mvt/euler_scheme.hpp"
#include "mvt/measure.hpp"
#include "mvt/stopped_flow.hpp"
#include "mvt/velocity_model.hpp"
#include "mvt/weak_residual.hpp"

namespace mvt {

// Scalar function spec, one of:
//   constant c | affine a b | piecewise_linear [(x0,y0),...] | boundary_layer n
struct FunctionSpec {
  std::string kind;
  std::vector<double> params;
  std::vector<std::pair<double, double>> nodes;
};

// Initial measure: explicit atoms, or a named density quantized to N
// equal-mass atoms at the density's quantile midpoints.
struct MeasureSpec {
  bool explicit_atoms = true;
  std::vector<std::pair<double, double>> atoms;
  std::string density;
  int atom_count = 0;
};

struct VelocitySpec {
  bool is_kernel = false;
  FunctionSpec fn;
};

struct ScenarioConfig {
  std::string name = "scenario";
  MeasureSpec initial;
  VelocitySpec velocity;
  FunctionSpec gating;
  double horizon = 1.0;
  int k_max = 4;
  double substep = 1e-3;
  double boundary_bisect_tol = 1e-12;
  int max_mode = 4;
  int samples_per_interval = 1;
  std::vector<int> boundary_layer_ns;
  std::string out_dir = "out";

  IntegratorConfig integrator() const { return {substep, boundary_bisect_tol}; }

  void validate() const {
    if (!(horizon > 0.0)) throw BadSpec("horizon must be positive");
    if (k_max < 1) throw BadSpec("k_max must be >= 1");
    if (max_mode < 0) throw BadSpec("max_mode must be >= 0");
    if (samples_per_interval < 1) throw BadSpec("samples_per_interval must be >= 1");
    integrator().validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  std::size_t b = s.size();
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double to_number(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw BadSpec(where + ": expected a number, got '" + tok + "'");
  }
}

inline int to_int(const std::string& tok, const std::string& where) {
  double v = to_number(tok, where);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw BadSpec(where + ": expected an integer, got '" + tok + "'");
  return i;
}

// "[(a,b),(c,d),...]" with optional whitespace
inline std::vector<std::pair<double, double>> parse_tuple_list(const std::string& text,
                                                               const std::string& where) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.size() < 2 || compact.front() != '[' || compact.back() != ']') {
    throw BadSpec(where + ": expected [(x0,y0),(x1,y1),...]");
  }
  std::vector<std::pair<double, double>> out;
  std::size_t i = 1;
  while (i < compact.size() - 1) {
    if (compact[i] == ',') {
      ++i;
      continue;
    }
    if (compact[i] != '(') throw BadSpec(where + ": expected '(' in tuple list");
    std::size_t close = compact.find(')', i);
    if (close == std::string::npos) throw BadSpec(where + ": unterminated tuple");
    std::string body = compact.substr(i + 1, close - i - 1);
    std::size_t comma = body.find(',');
    if (comma == std::string::npos) throw BadSpec(where + ": tuple needs two entries");
    out.emplace_back(to_number(body.substr(0, comma), where),
                     to_number(body.substr(comma + 1), where));
    i = close + 1;
  }
  if (out.empty()) throw BadSpec(where + ": empty tuple list");
  return out;
}

inline FunctionSpec parse_function_spec(const std::string& text, const std::string& where) {
  std::string trimmed = trim(text);
  std::size_t space = trimmed.find_first_of(" \t");
  std::string kind = space == std::string::npos ? trimmed : trimmed.substr(0, space);
  std::string rest = space == std::string::npos ? "" : trim(trimmed.substr(space));
  FunctionSpec spec;
  spec.kind = kind;
  if (kind == "constant") {
    std::vector<std::string> toks = tokenize(rest);
    if (toks.size() != 1) throw BadSpec(where + ": constant takes one parameter");
    spec.params = {to_number(toks[0], where)};
  } else if (kind == "affine") {
    std::vector<std::string> toks = tokenize(rest);
    if (toks.size() != 2) throw BadSpec(where + ": affine takes two parameters (a b)");
    spec.params = {to_number(toks[0], where), to_number(toks[1], where)};
  } else if (kind == "piecewise_linear") {
    spec.nodes = parse_tuple_list(rest, where);
  } else if (kind == "boundary_layer") {
    std::vector<std::string> toks = tokenize(rest);
    if (toks.size() != 1) throw BadSpec(where + ": boundary_layer takes one parameter (n)");
    spec.params = {static_cast<double>(to_int(toks[0], where))};
  } else {
    throw BadSpec(where + ": unknown function kind '" + kind + "'");
  }
  return spec;
}

}  // namespace detail

// Builds a plain bounded-Lipschitz function on [lo, hi] from a spec;
// boundary_layer is not accepted here (it describes a gating profile).
inline BLFunction build_bl_function(const FunctionSpec& spec, double lo = 0.0, double hi = 1.0) {
  if (spec.kind == "constant") return constant_fn(spec.params.at(0));
  if (spec.kind == "affine") return affine_fn(spec.params.at(0), spec.params.at(1), lo, hi);
  if (spec.kind == "piecewise_linear") {
    std::vector<std::pair<double, double>> nodes = spec.nodes;
    if (nodes.front().first != lo || nodes.back().first != hi) {
      throw BadSpec("piecewise_linear nodes must span the whole domain");
    }
    return piecewise_linear_fn(std::move(nodes));
  }
  throw BadSpec("function kind '" + spec.kind + "' not usable as a plain field");
}

inline GatingFunction build_gating(const FunctionSpec& spec) {
  if (spec.kind == "boundary_layer") {
    return boundary_layer_family(static_cast<int>(spec.params.at(0)));
  }
  if (spec.kind == "piecewise_linear") {
    // one piece per segment so solver substeps split at every node
    const std::vector<std::pair<double, double>>& nodes = spec.nodes;
    if (nodes.front().first != 0.0 || nodes.back().first != 1.0) {
      throw BadSpec("gating piecewise_linear nodes must span [0,1]");
    }
    BLFunction whole = piecewise_linear_fn(nodes);
    std::vector<GatingPiece> pieces;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (nodes[i].first == nodes[i + 1].first) continue;  // jump, not a piece
      pieces.push_back({nodes[i].first, nodes[i + 1].first, whole});
    }
    return GatingFunction(std::move(pieces));
  }
  return GatingFunction::from(build_bl_function(spec));
}

inline VelocityModel build_velocity(const VelocitySpec& spec) {
  if (spec.is_kernel) {
    Kernel k{build_bl_function(spec.fn, -1.0, 1.0)};
    return kernel_model(std::move(k), "kernel " + spec.fn.kind);
  }
  return fixed_field_model(build_bl_function(spec.fn), "field " + spec.fn.kind);
}

// Quantile function of the named density on [0,1].
inline double density_quantile(const std::string& density, double p) {
  if (density == "uniform") return p;
  if (density == "tent") {
    // density 4x on [0, 1/2], 4(1-x) on [1/2, 1]
    if (p <= 0.5) return std::sqrt(p / 2.0);
    return 1.0 - std::sqrt((1.0 - p) / 2.0);
  }
  throw BadSpec("unknown density '" + density + "'");
}

// Explicit atom lists pass through; densities are quantized to N equal-mass
// atoms at quantile midpoints. Weights are taken as consecutive quantile-mass
// differences, which telescope so the totals agree exactly.
inline ParticleMeasure ingest_initial_measure(const MeasureSpec& spec) {
  if (spec.explicit_atoms) {
    std::vector<Atom> atoms;
    atoms.reserve(spec.atoms.size());
    for (const auto& [pos, w] : spec.atoms) {
      if (!(pos >= 0.0 && pos <= 1.0)) throw BadSpec("initial atom position outside [0,1]");
      atoms.push_back({pos, w});
    }
    return ParticleMeasure(std::move(atoms));
  }
  if (spec.atom_count < 1) throw BadSpec("density quantization needs atom count >= 1");
  int n = spec.atom_count;
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  double prev_q = 0.0;
  for (int i = 0; i < n; ++i) {
    double q_hi = static_cast<double>(i + 1) / static_cast<double>(n);
    double mid = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    atoms.push_back({density_quantile(spec.density, mid), q_hi - prev_q});
    prev_q = q_hi;
  }
  return ParticleMeasure(std::move(atoms));
}

// Structured key-value config text: `key = value` lines, '#' comments.
inline ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_velocity = false;
  bool saw_gating = false;
  bool saw_initial = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = line;
    std::size_t hash = stripped.find('#');
    if (hash != std::string::npos) stripped = stripped.substr(0, hash);
    stripped = detail::trim(stripped);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw BadSpec("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = detail::trim(stripped.substr(0, eq));
    std::string value = detail::trim(stripped.substr(eq + 1));
    std::string where = "config line " + std::to_string(line_no) + " (" + key + ")";

    if (key == "name") {
      cfg.name = value;
    } else if (key == "initial") {
      saw_initial = true;
      std::size_t sp = value.find_first_of(" \t");
      std::string head = sp == std::string::npos ? value : value.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : detail::trim(value.substr(sp));
      if (head == "atoms") {
        cfg.initial.explicit_atoms = true;
        cfg.initial.atoms = detail::parse_tuple_list(rest, where);
      } else if (head == "density") {
        std::vector<std::string> toks = detail::tokenize(rest);
        if (toks.size() != 2) throw BadSpec(where + ": density takes <name> <atom_count>");
        cfg.initial.explicit_atoms = false;
        cfg.initial.density = toks[0];
        cfg.initial.atom_count = detail::to_int(toks[1], where);
      } else {
        throw BadSpec(where + ": initial must start with 'atoms' or 'density'");
      }
    } else if (key == "velocity") {
      saw_velocity = true;
      std::size_t sp = value.find_first_of(" \t");
      std::string head = sp == std::string::npos ? value : value.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : detail::trim(value.substr(sp));
      if (head == "field") {
        cfg.velocity.is_kernel = false;
      } else if (head == "kernel") {
        cfg.velocity.is_kernel = true;
      } else {
        throw BadSpec(where + ": velocity must start with 'field' or 'kernel'");
      }
      cfg.velocity.fn = detail::parse_function_spec(rest, where);
    } else if (key == "gating") {
      saw_gating = true;
      cfg.gating = detail::parse_function_spec(value, where);
    } else if (key == "horizon") {
      cfg.horizon = detail::to_number(value, where);
    } else if (key == "k_max") {
      cfg.k_max = detail::to_int(value, where);
    } else if (key == "substep") {
      cfg.substep = detail::to_number(value, where);
    } else if (key == "boundary_bisect_tol") {
      cfg.boundary_bisect_tol = detail::to_number(value, where);
    } else if (key == "max_mode") {
      cfg.max_mode = detail::to_int(value, where);
    } else if (key == "samples_per_interval") {
      cfg.samples_per_interval = detail::to_int(value, where);
    } else if (key == "boundary_layer_ns") {
      cfg.boundary_layer_ns.clear();
      for (const std::string& tok : detail::tokenize(value)) {
        cfg.boundary_layer_ns.push_back(detail::to_int(tok, where));
      }
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw BadSpec(where + ": unknown key");
    }
  }
  if (!saw_initial) throw BadSpec("config: missing 'initial'");
  if (!saw_velocity) throw BadSpec("config: missing 'velocity'");
  if (!saw_gating) throw BadSpec("config: missing 'gating'");
  cfg.validate();
  return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw BadSpec("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// The shipped scenario catalog; these are what the test suites sweep.
inline std::vector<ScenarioConfig> builtin_scenarios() {
  std::vector<ScenarioConfig> out;

  {
    ScenarioConfig c;
    c.name = "stopped_transport";
    c.initial.atoms = {{0.3, 1.0}};
    c.velocity.fn = {"constant", {1.0}, {}};
    c.gating = {"constant", {0.0}, {}};
    c.horizon = 1.0;
    c.k_max = 5;
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "two_atom_attraction";
    c.initial.atoms = {{0.25, 0.5}, {0.75, 0.5}};
    c.velocity.is_kernel = true;
    c.velocity.fn = {"affine", {0.0, -1.0}, {}};
    c.gating = {"constant", {0.0}, {}};
    c.horizon = 1.0;
    c.k_max = 5;
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "decay_at_rest";
    c.initial.explicit_atoms = false;
    c.initial.density = "uniform";
    c.initial.atom_count = 8;
    c.velocity.fn = {"constant", {0.0}, {}};
    c.gating = {"constant", {-1.0}, {}};
    c.horizon = 1.0;
    c.k_max = 4;
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "drift_to_wall";
    c.initial.explicit_atoms = false;
    c.initial.density = "uniform";
    c.initial.atom_count = 8;
    c.velocity.fn = {"affine", {1.0, -1.0}, {}};  // 1 - x, vanishing at the wall
    c.gating = {"affine", {-1.0, 1.0}, {}};       // x - 1 <= 0
    c.horizon = 1.0;
    c.k_max = 4;
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "boundary_layer_sink";
    c.initial.atoms = {{0.5, 1.0}};
    c.velocity.fn = {"constant", {1.0}, {}};
    c.gating = {"boundary_layer", {8.0}, {}};
    c.horizon = 1.0;
    c.k_max = 4;
    c.boundary_layer_ns = {4, 8, 16, 32};
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "biased_attraction";
    c.initial.atoms = {{0.25, 0.5}, {0.75, 0.5}};
    c.velocity.is_kernel = true;
    c.velocity.fn = {"affine", {0.2, -1.0}, {}};  // K(z) = 0.2 - z
    c.gating = {"constant", {0.0}, {}};
    c.horizon = 1.0;
    c.k_max = 6;
    out.push_back(c);
  }
  {
    ScenarioConfig c;
    c.name = "signed_growth";
    c.initial.atoms = {{0.3, 1.0}, {0.7, -0.5}};
    c.velocity.is_kernel = true;
    c.velocity.fn = {"affine", {0.0, -0.5}, {}};
    c.gating = {"constant", {0.25}, {}};
    c.horizon = 0.5;
    c.k_max = 4;
    out.push_back(c);
  }
  return out;
}

inline std::optional<ScenarioConfig> find_builtin_scenario(const std::string& name) {
  for (ScenarioConfig& c : builtin_scenarios()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

// One refinement ladder entry of the boundary-layer study for a fixed n.
struct BoundaryLayerLevel {
  int k = 0;
  double mesh = 0.0;
  double sup_flat_gap = 0.0;  // gap to the previous refinement level
  double end_mass = 0.0;
};

struct BoundaryLayerEntry {
  int n = 0;
  std::vector<BoundaryLayerLevel> levels;
  double end_mass_finest = 0.0;
  double end_mass_extrapolated = 0.0;
  double max_defect_finest = 0.0;
  double gap_to_previous_n = std::numeric_limits<double>::quiet_NaN();
  bool mass_trace_monotone = true;  // nonincreasing mass along the finest run
};

struct BoundaryLayerReport {
  std::vector<BoundaryLayerEntry> entries;
};

// The boundary-layer study: for each n, run the dyadic refinement ladder
// with gating f_n, record convergence gaps, end-time masses with a
// first-order extrapolation, residual sweeps at the finest level, and the
// sup-flat gap between consecutive n at the finest level. The study reports
// gaps only; whether the n-limit exists is left open by design.
inline BoundaryLayerReport run_boundary_layer_program(const ScenarioConfig& cfg) {
  if (cfg.boundary_layer_ns.empty()) {
    throw BadSpec("boundary-layer program needs boundary_layer_ns");
  }
  cfg.validate();
  ParticleMeasure nu0 = ingest_initial_measure(cfg.initial);
  VelocityModel model = build_velocity(cfg.velocity);
  IntegratorConfig integrator = cfg.integrator();
  std::vector<TestFunction> catalog = test_function_catalog(cfg.horizon, cfg.max_mode);

  BoundaryLayerReport report;
  std::optional<Trajectory> previous_finest;
  for (int n : cfg.boundary_layer_ns) {
    GatingFunction fn = boundary_layer_family(n);
    BoundaryLayerEntry entry;
    entry.n = n;

    std::vector<Partition> ladder = dyadic_refinements(cfg.horizon, cfg.k_max);
    Trajectory prev;
    Trajectory coarse_kept;
    for (int k = 1; k <= cfg.k_max; ++k) {
      Trajectory run = euler_solve(nu0, model, fn, ladder[static_cast<std::size_t>(k - 1)],
                                   integrator, cfg.samples_per_interval);
      BoundaryLayerLevel level;
      level.k = k;
      level.mesh = ladder[static_cast<std::size_t>(k - 1)].mesh();
      level.end_mass = total_mass(run.final());
      if (k > 1) level.sup_flat_gap = sup_flat_distance(prev, run);
      entry.levels.push_back(level);
      if (k == cfg.k_max - 1 || cfg.k_max == 1) coarse_kept = run;
      prev = std::move(run);
    }
    entry.end_mass_finest = total_mass(prev.final());
    entry.end_mass_extrapolated =
        cfg.k_max >= 2 ? extrapolated_end_mass(coarse_kept, prev) : entry.end_mass_finest;
    entry.max_defect_finest = max_defect(defect_sweep(prev, model, fn, catalog));
    double last_mass = std::numeric_limits<double>::infinity();
    for (const ParticleMeasure& slice : prev.slices) {
      double m = total_mass(slice);
      if (m > last_mass * (1.0 + 1e-12) + 1e-15) entry.mass_trace_monotone = false;
      last_mass = m;
    }
    if (previous_finest.has_value()) {
      entry.gap_to_previous_n = sup_flat_distance(*previous_finest, prev);
    }
    previous_finest = std::move(prev);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mvt
