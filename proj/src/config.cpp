#include "pmflow/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace pmflow {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

void check_object(const json& o, const std::string& path) {
  if (!o.is_object()) fail(path, "must be an object");
}

void check_keys(const json& o, const std::string& path,
                std::initializer_list<const char*> allowed) {
  check_object(o, path);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = o.begin(); it != o.end(); ++it)
    if (!ok.count(it.key()))
      fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double num_at(const json& o, const std::string& path, const char* key) {
  if (!o.contains(key)) fail(join(path, key), "missing");
  if (!o.at(key).is_number()) fail(join(path, key), "must be a number");
  return o.at(key).get<double>();
}

double num_or(const json& o, const std::string& path, const char* key,
              double def) {
  if (!o.contains(key)) return def;
  if (!o.at(key).is_number()) fail(join(path, key), "must be a number");
  return o.at(key).get<double>();
}

int int_at(const json& o, const std::string& path, const char* key) {
  if (!o.contains(key)) fail(join(path, key), "missing");
  if (!o.at(key).is_number_integer()) fail(join(path, key), "must be an integer");
  return o.at(key).get<int>();
}

int int_or(const json& o, const std::string& path, const char* key, int def) {
  if (!o.contains(key)) return def;
  if (!o.at(key).is_number_integer()) fail(join(path, key), "must be an integer");
  return o.at(key).get<int>();
}

bool bool_or(const json& o, const std::string& path, const char* key, bool def) {
  if (!o.contains(key)) return def;
  if (!o.at(key).is_boolean()) fail(join(path, key), "must be a boolean");
  return o.at(key).get<bool>();
}

std::string str_at(const json& o, const std::string& path, const char* key) {
  if (!o.contains(key)) fail(join(path, key), "missing");
  if (!o.at(key).is_string()) fail(join(path, key), "must be a string");
  return o.at(key).get<std::string>();
}

std::string str_or(const json& o, const std::string& path, const char* key,
                   const std::string& def) {
  if (!o.contains(key)) return def;
  if (!o.at(key).is_string()) fail(join(path, key), "must be a string");
  return o.at(key).get<std::string>();
}

AxisFactor parse_factor(const json& o, const std::string& path) {
  check_keys(o, path, {"kind", "k", "center", "width"});
  AxisFactor f;
  std::string kind = str_at(o, path, "kind");
  if (kind == "one")
    f.kind = AxisFactor::Kind::one;
  else if (kind == "cos")
    f.kind = AxisFactor::Kind::cos_mode;
  else if (kind == "sin")
    f.kind = AxisFactor::Kind::sin_mode;
  else if (kind == "bump")
    f.kind = AxisFactor::Kind::bump;
  else
    fail(join(path, "kind"), "must be one of one, cos, sin, bump");
  f.k = int_or(o, path, "k", 1);
  f.center = num_or(o, path, "center", 0.0);
  f.width = num_or(o, path, "width", 1.0);
  return f;
}

Envelope parse_envelope(const json& o, const std::string& path) {
  check_keys(o, path, {"kind", "rate"});
  Envelope e;
  std::string kind = str_at(o, path, "kind");
  if (kind == "constant")
    e.kind = Envelope::Kind::constant;
  else if (kind == "exp-decay")
    e.kind = Envelope::Kind::exp_decay;
  else if (kind == "cosine")
    e.kind = Envelope::Kind::cosine;
  else
    fail(join(path, "kind"), "must be one of constant, exp-decay, cosine");
  e.rate = num_or(o, path, "rate", 0.0);
  return e;
}

PotentialSpec parse_potential(const json& o, const std::string& path) {
  check_keys(o, path, {"modes"});
  PotentialSpec spec;
  if (!o.contains("modes")) return spec;
  const json& modes = o.at("modes");
  if (!modes.is_array()) fail(join(path, "modes"), "must be an array");
  int idx = 0;
  for (const json& m : modes) {
    std::string mpath = path + ".modes[" + std::to_string(idx) + "]";
    check_keys(m, mpath, {"amplitude", "factors", "envelope"});
    PotentialMode mode;
    mode.amplitude = num_at(m, mpath, "amplitude");
    if (m.contains("envelope"))
      mode.envelope = parse_envelope(m.at("envelope"), mpath + ".envelope");
    if (!m.contains("factors")) fail(mpath + ".factors", "missing");
    const json& factors = m.at("factors");
    if (!factors.is_array() || factors.empty() || factors.size() > 2)
      fail(mpath + ".factors", "must be an array of one or two factors");
    for (std::size_t a = 0; a < factors.size(); ++a)
      mode.factor[a] = parse_factor(
          factors[a], mpath + ".factors[" + std::to_string(a) + "]");
    spec.modes.push_back(mode);
    ++idx;
  }
  return spec;
}

InitialData parse_initial(const json& o, const std::string& path, double L) {
  check_keys(o, path,
             {"profile", "amplitude", "center", "width", "inner_radius",
              "outer_radius", "bb_C", "tau0", "seed", "pressure_level"});
  InitialData d;
  std::string profile = str_at(o, path, "profile");
  if (profile == "constant")
    d.profile = InitialData::Profile::constant;
  else if (profile == "gaussian-bump")
    d.profile = InitialData::Profile::gaussian_bump;
  else if (profile == "annulus")
    d.profile = InitialData::Profile::annulus;
  else if (profile == "barenblatt")
    d.profile = InitialData::Profile::barenblatt;
  else if (profile == "random-smooth")
    d.profile = InitialData::Profile::random_smooth;
  else
    fail(join(path, "profile"),
         "must be one of constant, gaussian-bump, annulus, barenblatt, "
         "random-smooth");
  d.amplitude = num_or(o, path, "amplitude", 1.0);
  d.center_x = 0.5 * L;
  d.center_y = 0.5 * L;
  if (o.contains("center")) {
    const json& c = o.at("center");
    if (!c.is_array() || c.empty() || c.size() > 2)
      fail(join(path, "center"), "must be an array of one or two numbers");
    for (const json& x : c)
      if (!x.is_number()) fail(join(path, "center"), "must hold numbers");
    d.center_x = c[0].get<double>();
    d.center_y = c.size() > 1 ? c[1].get<double>() : 0.5 * L;
  }
  d.width = num_or(o, path, "width", 1.0);
  d.inner_radius = num_or(o, path, "inner_radius", 0.0);
  d.outer_radius = num_or(o, path, "outer_radius", 1.0);
  d.bb_C = num_or(o, path, "bb_C", 0.1);
  d.tau0 = num_or(o, path, "tau0", 0.25);
  d.seed = static_cast<unsigned>(int_or(o, path, "seed", 1));
  d.pressure_level = bool_or(o, path, "pressure_level", false);
  return d;
}

}  // namespace

Grid RunConfig::make_grid() const {
  return dim == 1 ? Grid::line(n_cells, box_length)
                  : Grid::square(n_cells, box_length);
}

GammaSweepPlan RunConfig::to_plan() const {
  GammaSweepPlan plan;
  plan.gammas = sweep_gammas;
  plan.nu = medium.nu;
  plan.dim = dim;
  plan.n_cells = n_cells;
  plan.box_length = box_length;
  plan.T = T;
  plan.samples = samples;
  plan.potential = potential;
  plan.initial = initial;
  plan.solver = solver;
  return plan;
}

RunConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "",
             {"grid", "medium", "potential", "initial", "time", "solver",
              "output", "sweep"});
  RunConfig c;

  if (!j.contains("grid")) fail("grid", "missing");
  const json& grid = j.at("grid");
  check_keys(grid, "grid", {"dim", "n_cells", "length"});
  c.dim = int_at(grid, "grid", "dim");
  if (c.dim != 1 && c.dim != 2) fail("grid.dim", "must be 1 or 2");
  c.n_cells = int_at(grid, "grid", "n_cells");
  if (c.n_cells < 8 || !is_power_of_two(c.n_cells))
    fail("grid.n_cells", "must be a power of two, at least 8");
  c.box_length = num_at(grid, "grid", "length");
  if (!(c.box_length > 0.0)) fail("grid.length", "must be positive");

  if (!j.contains("medium")) fail("medium", "missing");
  const json& med = j.at("medium");
  check_keys(med, "medium", {"gamma", "nu"});
  c.medium.gamma = num_at(med, "medium", "gamma");
  c.medium.nu = num_or(med, "medium", "nu", 0.0);
  if (!(c.medium.gamma > 1.0)) fail("medium.gamma", "must exceed 1");
  if (!(c.medium.nu >= 0.0)) fail("medium.nu", "must be nonnegative");

  if (j.contains("potential"))
    c.potential = parse_potential(j.at("potential"), "potential");
  try {
    c.potential.validate(c.dim);
  } catch (const std::exception& e) {
    fail("potential", e.what());
  }

  if (!j.contains("initial")) fail("initial", "missing");
  c.initial = parse_initial(j.at("initial"), "initial", c.box_length);
  try {
    c.initial.validate();
  } catch (const std::exception& e) {
    fail("initial", e.what());
  }

  if (!j.contains("time")) fail("time", "missing");
  const json& time = j.at("time");
  check_keys(time, "time", {"T", "samples"});
  c.T = num_at(time, "time", "T");
  if (!(c.T > 0.0)) fail("time.T", "must be positive");
  c.samples = int_or(time, "time", "samples", 200);
  if (c.samples < 1) fail("time.samples", "must be at least 1");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver",
               {"dt_initial", "dt_max", "cfl", "newton_tol", "newton_max_iter",
                "lin_tol", "max_dt_halvings", "seam_tol", "dt_growth"});
    c.solver.dt_initial = num_or(s, "solver", "dt_initial", c.solver.dt_initial);
    c.solver.dt_max = num_or(s, "solver", "dt_max", c.solver.dt_max);
    c.solver.cfl = num_or(s, "solver", "cfl", c.solver.cfl);
    c.solver.newton_tol = num_or(s, "solver", "newton_tol", c.solver.newton_tol);
    c.solver.newton_max_iter =
        int_or(s, "solver", "newton_max_iter", c.solver.newton_max_iter);
    c.solver.lin_tol = num_or(s, "solver", "lin_tol", c.solver.lin_tol);
    c.solver.max_dt_halvings =
        int_or(s, "solver", "max_dt_halvings", c.solver.max_dt_halvings);
    c.solver.seam_tol = num_or(s, "solver", "seam_tol", c.solver.seam_tol);
    c.solver.dt_growth = num_or(s, "solver", "dt_growth", c.solver.dt_growth);
  }
  try {
    c.solver.validate();
  } catch (const std::exception& e) {
    fail("solver", e.what());
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"dir", "checkpoint_every"});
    c.out_dir = str_or(o, "output", "dir", c.out_dir);
    c.checkpoint_every = int_or(o, "output", "checkpoint_every", 0);
    if (c.checkpoint_every < 0) fail("output.checkpoint_every", "must be >= 0");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"gammas"});
    if (s.contains("gammas")) {
      const json& gs = s.at("gammas");
      if (!gs.is_array() || gs.empty())
        fail("sweep.gammas", "must be a non-empty array");
      c.sweep_gammas.clear();
      for (const json& g : gs) {
        if (!g.is_number()) fail("sweep.gammas", "must hold numbers");
        c.sweep_gammas.push_back(g.get<double>());
      }
      for (std::size_t i = 0; i < c.sweep_gammas.size(); ++i) {
        if (!(c.sweep_gammas[i] > 1.0)) fail("sweep.gammas", "values must exceed 1");
        if (i > 0 && c.sweep_gammas[i] <= c.sweep_gammas[i - 1])
          fail("sweep.gammas", "values must strictly increase");
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

namespace {

json factor_json(const AxisFactor& f) {
  json o;
  switch (f.kind) {
    case AxisFactor::Kind::one: o["kind"] = "one"; break;
    case AxisFactor::Kind::cos_mode: o["kind"] = "cos"; break;
    case AxisFactor::Kind::sin_mode: o["kind"] = "sin"; break;
    case AxisFactor::Kind::bump: o["kind"] = "bump"; break;
  }
  o["k"] = f.k;
  o["center"] = f.center;
  o["width"] = f.width;
  return o;
}

}  // namespace

nlohmann::json canonical_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"dim", c.dim}, {"n_cells", c.n_cells}, {"length", c.box_length}};
  j["medium"] = {{"gamma", c.medium.gamma}, {"nu", c.medium.nu}};
  json modes = json::array();
  for (const auto& m : c.potential.modes) {
    json mo;
    mo["amplitude"] = m.amplitude;
    switch (m.envelope.kind) {
      case Envelope::Kind::constant: mo["envelope"] = {{"kind", "constant"}}; break;
      case Envelope::Kind::exp_decay:
        mo["envelope"] = {{"kind", "exp-decay"}, {"rate", m.envelope.rate}};
        break;
      case Envelope::Kind::cosine:
        mo["envelope"] = {{"kind", "cosine"}, {"rate", m.envelope.rate}};
        break;
    }
    mo["factors"] = {factor_json(m.factor[0]), factor_json(m.factor[1])};
    modes.push_back(mo);
  }
  j["potential"] = {{"modes", modes}};
  const char* profile = "constant";
  switch (c.initial.profile) {
    case InitialData::Profile::constant: profile = "constant"; break;
    case InitialData::Profile::gaussian_bump: profile = "gaussian-bump"; break;
    case InitialData::Profile::annulus: profile = "annulus"; break;
    case InitialData::Profile::barenblatt: profile = "barenblatt"; break;
    case InitialData::Profile::random_smooth: profile = "random-smooth"; break;
  }
  j["initial"] = {{"profile", profile},
                  {"amplitude", c.initial.amplitude},
                  {"center", {c.initial.center_x, c.initial.center_y}},
                  {"width", c.initial.width},
                  {"inner_radius", c.initial.inner_radius},
                  {"outer_radius", c.initial.outer_radius},
                  {"bb_C", c.initial.bb_C},
                  {"tau0", c.initial.tau0},
                  {"seed", c.initial.seed},
                  {"pressure_level", c.initial.pressure_level}};
  j["time"] = {{"T", c.T}, {"samples", c.samples}};
  j["solver"] = {{"dt_initial", c.solver.dt_initial},
                 {"dt_max", c.solver.dt_max},
                 {"cfl", c.solver.cfl},
                 {"newton_tol", c.solver.newton_tol},
                 {"newton_max_iter", c.solver.newton_max_iter},
                 {"lin_tol", c.solver.lin_tol},
                 {"max_dt_halvings", c.solver.max_dt_halvings},
                 {"seam_tol", c.solver.seam_tol},
                 {"dt_growth", c.solver.dt_growth}};
  j["sweep"] = {{"gammas", c.sweep_gammas}};
  // output location is not part of the identity of a run
  return j;
}

std::string config_hash(const RunConfig& c) {
  std::string dump = canonical_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pmflow
