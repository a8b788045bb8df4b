#include "dnpsim/experiments/config.hpp"

#include "dnpsim/errors.hpp"
#include "dnpsim/io/csv.hpp"
#include "dnpsim/random.hpp"
#include "dnpsim/series.hpp"
#include "dnpsim/units.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dnpsim::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> TimeGridSpec::build() const {
  std::vector<double> g;
  switch (kind) {
    case Kind::Linear: g = linear_grid(stop, points); break;
    case Kind::Log: g = log_grid(first, stop, points); break;
    case Kind::Explicit: g = values; break;
  }
  check_time_grid(g);
  return g;
}

namespace {

// ---- reading --------------------------------------------------------------

class Reader {
 public:
  Reader(YAML::Node node, std::string path, fs::path base) : node_(std::move(node)), path_(std::move(path)), base_(std::move(base)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail("", "must be a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_[key] && !node_[key].IsNull(); }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ConfigError((where.empty() ? std::string("config") : where) + ": " + why);
  }

  YAML::Node raw(const std::string& key) const {
    if (!has(key)) fail(key, "is required");
    return node_[key];
  }

  Reader child(const std::string& key) const {
    return Reader(has(key) ? node_[key] : YAML::Node(), path_.empty() ? key : path_ + "." + key, base_);
  }

  std::string text(const std::string& key) const {
    const auto n = raw(key);
    if (!n.IsScalar()) fail(key, "must be a scalar");
    return n.Scalar();
  }

  double quantity(const std::string& key, Dimension dim) const {
    try {
      return parse_quantity(text(key), dim);
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }

  double quantity_or(const std::string& key, Dimension dim, double fallback) const {
    return has(key) ? quantity(key, dim) : fallback;
  }

  double rate(const std::string& key) const {
    try {
      return parse_rate_or_time(text(key));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }

  double number(const std::string& key) const {
    const std::string s = text(key);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      fail(key, "expected a plain number, got '" + s + "'");
    }
    if (!std::isfinite(v)) fail(key, "must be finite");
    return v;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t integer(const std::string& key) const {
    const std::string s = text(key);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      fail(key, "expected a non-negative integer, got '" + s + "'");
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      fail(key, "integer out of range");
    }
  }

  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    if (s == "true" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "no" || s == "off") return false;
    fail(key, "expected true or false");
  }

  std::vector<YAML::Node> list(const std::string& key) const {
    const auto n = raw(key);
    if (!n.IsSequence()) fail(key, "must be a list");
    return {n.begin(), n.end()};
  }

  void only(std::initializer_list<const char*> allowed) const {
    if (!node_ || node_.IsNull()) return;
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(key, "unknown key");
    }
  }

  const std::string& path() const { return path_; }
  const fs::path& base() const { return base_; }

 private:
  YAML::Node node_;
  std::string path_;
  fs::path base_;
};

double scalar_quantity(const YAML::Node& n, Dimension dim, const std::string& where) {
  if (!n.IsScalar()) throw ConfigError(where + ": expected a quantity");
  try {
    return parse_quantity(n.Scalar(), dim);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

double scalar_number(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<double>();
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number");
  }
}

PhysicalParams read_physics(const Reader& r, std::string& nucleus) {
  r.only({"nucleus", "B0", "temperature", "omegaI", "omega1", "lambda", "R1S", "R2S", "R1I", "R2I", "T1e", "T2e",
          "T1n", "T2n"});
  PhysicalParams p;
  nucleus = r.has("nucleus") ? r.text("nucleus") : "13C";
  try {
    p.gamma_n = nuclear_gamma(nucleus);
  } catch (const DomainError& e) {
    r.fail("nucleus", e.what());
  }
  p.gamma_e = constants::gamma_e;
  p.B0 = r.quantity("B0", Dimension::Field);
  p.temperature = r.quantity("temperature", Dimension::Temperature);
  if (r.has("omegaI")) p.omegaI_override = r.quantity("omegaI", Dimension::Frequency);
  p.omega1 = r.quantity("omega1", Dimension::Frequency);
  p.lambda = r.quantity_or("lambda", Dimension::Frequency, 0.0);
  auto relax = [&](const char* rate_key, const char* time_key) {
    if (r.has(rate_key) && r.has(time_key)) r.fail(rate_key, std::string("give either ") + rate_key + " or " + time_key);
    if (r.has(rate_key)) return r.rate(rate_key);
    return r.rate(time_key);
  };
  p.R1S = relax("R1S", "T1e");
  p.R2S = relax("R2S", "T2e");
  p.R1I = relax("R1I", "T1n");
  p.R2I = relax("R2I", "T2n");
  try {
    p.validate();
  } catch (const DomainError& e) {
    r.fail("", e.what());
  }
  return p;
}

SystemSpec read_system(const Reader& r) {
  SystemSpec s;
  const std::string type = r.text("type");
  const Reader scale = r.child("scale");
  scale.only({"dipolar", "bulk_dipolar", "first_pseudosecular"});
  s.dipolar_scale = scale.number_or("dipolar", 1.0);
  s.bulk_dipolar_scale = scale.number_or("bulk_dipolar", 1.0);
  s.first_pseudosecular_scale = scale.number_or("first_pseudosecular", 1.0);
  if (r.has("pair_cutoff")) s.pair_cutoff = r.quantity("pair_cutoff", Dimension::Length);

  if (type == "chain") {
    r.only({"type", "sites", "spacing", "angle", "jitter", "seed", "pair_cutoff", "scale"});
    ChainLatticeSpec c;
    c.n_sites = static_cast<int>(r.integer("sites"));
    c.spacing = r.quantity("spacing", Dimension::Length);
    c.angle = r.quantity_or("angle", Dimension::Angle, 0.0);
    c.jitter = r.number_or("jitter", 0.0);
    c.seed = r.integer_or("seed", 1);
    s.source = c;
  } else if (type == "cube") {
    r.only({"type", "edge", "spacing", "jitter", "seed", "pair_cutoff", "scale"});
    CubicLatticeSpec c;
    c.m = static_cast<int>(r.integer("edge"));
    c.spacing = r.quantity("spacing", Dimension::Length);
    c.jitter = r.number_or("jitter", 0.0);
    c.seed = r.integer_or("seed", 1);
    s.source = c;
  } else if (type == "positions") {
    r.only({"type", "positions_angstrom", "file", "pair_cutoff", "scale"});
    PositionList pl;
    if (r.has("file")) {
      fs::path f = r.text("file");
      if (f.is_relative()) f = r.base() / f;
      if (!fs::exists(f)) r.fail("file", "referenced file does not exist: " + f.string());
      pl.file = f.string();
      pl.sites = io::read_geometry(f).positions();
    } else {
      std::size_t i = 0;
      for (const auto& row : r.list("positions_angstrom")) {
        const std::string where = r.path() + ".positions_angstrom[" + std::to_string(i++) + "]";
        if (!row.IsSequence() || row.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
        pl.sites.emplace_back(scalar_number(row[0], where), scalar_number(row[1], where), scalar_number(row[2], where));
      }
    }
    s.source = pl;
  } else if (type == "couplings") {
    r.only({"type", "A", "B", "d", "pair_cutoff", "scale"});
    ExplicitCouplings ec;
    std::size_t i = 0;
    for (const auto& v : r.list("A")) ec.A.push_back(scalar_quantity(v, Dimension::Frequency, r.path() + ".A[" + std::to_string(i++) + "]"));
    i = 0;
    for (const auto& v : r.list("B")) ec.B.push_back(scalar_quantity(v, Dimension::Frequency, r.path() + ".B[" + std::to_string(i++) + "]"));
    if (ec.A.size() != ec.B.size()) r.fail("B", "needs one entry per nucleus (as many as A)");
    if (r.has("d")) {
      i = 0;
      for (const auto& row : r.list("d")) {
        const std::string where = r.path() + ".d[" + std::to_string(i++) + "]";
        if (!row.IsSequence() || row.size() != 3) throw ConfigError(where + ": expected [k, j, value] (1-based nuclei)");
        const double kf = scalar_number(row[0], where), jf = scalar_number(row[1], where);
        if (kf != std::floor(kf) || jf != std::floor(jf)) throw ConfigError(where + ": nucleus indices must be integers");
        const auto k = static_cast<long>(kf), j = static_cast<long>(jf);
        const auto n = static_cast<long>(ec.A.size());
        if (k < 1 || j < 1 || k > n || j > n || k == j) throw ConfigError(where + ": nucleus index out of range");
        ec.d.push_back({static_cast<std::uint32_t>(std::min(k, j) - 1), static_cast<std::uint32_t>(std::max(k, j) - 1),
                        scalar_quantity(row[2], Dimension::Frequency, where)});
      }
    }
    s.source = ec;
  } else if (type == "random-chain") {
    r.only({"type", "nuclei", "B_first", "d_mean", "d_sd", "seed", "pair_cutoff", "scale"});
    RandomChainCouplings rc;
    rc.nuclei = r.integer("nuclei");
    if (rc.nuclei < 1) r.fail("nuclei", "must be >= 1");
    rc.B_first = r.quantity("B_first", Dimension::Frequency);
    rc.d_mean = r.quantity("d_mean", Dimension::Frequency);
    rc.d_sd = r.quantity_or("d_sd", Dimension::Frequency, 0.0);
    rc.seed = r.integer_or("seed", 1);
    s.source = rc;
  } else {
    r.fail("type", "unknown system type '" + type + "' (chain, cube, positions, couplings, random-chain)");
  }
  return s;
}

TimeGridSpec read_time(const Reader& r) {
  r.only({"grid", "first", "stop", "points", "values"});
  TimeGridSpec t;
  const std::string kind = r.has("grid") ? r.text("grid") : "linear";
  if (kind == "linear") {
    t.kind = TimeGridSpec::Kind::Linear;
  } else if (kind == "log") {
    t.kind = TimeGridSpec::Kind::Log;
    t.first = r.quantity("first", Dimension::Time);
  } else if (kind == "explicit") {
    t.kind = TimeGridSpec::Kind::Explicit;
    std::size_t i = 0;
    for (const auto& v : r.list("values")) t.values.push_back(scalar_quantity(v, Dimension::Time, r.path() + ".values[" + std::to_string(i++) + "]"));
  } else {
    r.fail("grid", "expected linear, log or explicit");
  }
  if (t.kind != TimeGridSpec::Kind::Explicit) {
    t.stop = r.quantity("stop", Dimension::Time);
    t.points = r.integer("points");
  }
  try {
    t.build();
  } catch (const SpecError& e) {
    r.fail("", e.what());
  }
  return t;
}

SimulationSpec read_simulation(const Reader& r) {
  r.only({"trajectories", "seed", "workers", "second_order", "time", "initial"});
  SimulationSpec s;
  s.trajectories = r.integer("trajectories");
  if (s.trajectories < 1) r.fail("trajectories", "must be >= 1");
  s.seed = r.integer_or("seed", 1);
  s.workers = static_cast<unsigned>(r.integer_or("workers", 0));
  s.second_order = r.boolean_or("second_order", false);
  s.time = read_time(r.child("time"));
  const Reader init = r.child("initial");
  init.only({"electron", "nuclei"});
  if (init.has("electron") && init.text("electron") != "thermal") s.initial_electron = init.number("electron");
  s.initial_nuclei = init.number_or("nuclei", 0.0);
  auto in_range = [](double p) { return p >= -1.0 && p <= 1.0; };
  if (s.initial_electron && !in_range(*s.initial_electron)) init.fail("electron", "must be in [-1, 1]");
  if (!in_range(s.initial_nuclei)) init.fail("nuclei", "must be in [-1, 1]");
  return s;
}

ReferenceSpec read_reference(const Reader& r) {
  r.only({"enabled", "method", "rel_tol", "dump_generator", "sigmas"});
  ReferenceSpec s;
  s.enabled = r.boolean_or("enabled", false);
  const std::string method = r.has("method") ? r.text("method") : "spectral";
  if (method == "spectral") {
    s.method = qme::PropagationMethod::Spectral;
  } else if (method == "expm") {
    s.method = qme::PropagationMethod::Exponential;
  } else if (method == "rk45") {
    s.method = qme::PropagationMethod::RungeKutta;
  } else {
    r.fail("method", "expected spectral, expm or rk45");
  }
  s.rel_tol = r.number_or("rel_tol", 1e-8);
  s.dump_generator = r.boolean_or("dump_generator", false);
  s.sigmas = r.number_or("sigmas", 3.0);
  return s;
}

DiffusionSpec read_diffusion(const Reader& r) {
  r.only({"enabled", "cells", "levels", "source", "origin_spin", "skip_nuclei", "transient_fraction"});
  DiffusionSpec s;
  s.enabled = r.boolean_or("enabled", false);
  s.cells = r.integer_or("cells", 300);
  if (r.has("levels")) {
    s.levels.clear();
    std::size_t i = 0;
    for (const auto& v : r.list("levels")) {
      const double l = scalar_number(v, r.path() + ".levels[" + std::to_string(i++) + "]");
      if (!(l > 0.0 && l < 1.0)) r.fail("levels", "levels are fractions of the source in (0, 1)");
      s.levels.push_back(l);
    }
  }
  if (r.has("source")) {
    const std::string src = r.text("source");
    if (src == "measured") {
      s.source = DiffusionSpec::Source::Measured;
    } else if (src == "plateau") {
      s.source = DiffusionSpec::Source::Plateau;
    } else {
      s.source = DiffusionSpec::Source::Fixed;
      s.source_value = r.number("source");
      if (s.source_value == 0.0) r.fail("source", "a fixed source must be nonzero");
    }
  }
  s.origin_spin = r.integer_or("origin_spin", 2);
  if (s.origin_spin < 1) r.fail("origin_spin", "must be a nucleus (>= 1)");
  s.skip_nuclei = r.integer_or("skip_nuclei", 2);
  s.transient_fraction = r.number_or("transient_fraction", 0.1);
  return s;
}

ExperimentConfig parse_node(YAML::Node root, const fs::path& base) {
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  if (root["config"] && root["config"].IsMap()) root = root["config"];  // run manifest
  const Reader r(root, "", base);
  r.only({"name", "physics", "system", "simulation", "reference", "diffusion", "validity", "output"});
  ExperimentConfig c;
  c.name = r.has("name") ? r.text("name") : "experiment";
  c.physics = read_physics(r.child("physics"), c.nucleus);
  if (!r.has("system")) r.fail("system", "is required");
  c.system = read_system(r.child("system"));
  if (!r.has("simulation")) r.fail("simulation", "is required");
  c.simulation = read_simulation(r.child("simulation"));
  c.reference = read_reference(r.child("reference"));
  c.diffusion = read_diffusion(r.child("diffusion"));
  const Reader v = r.child("validity");
  v.only({"threshold", "override"});
  c.validity.threshold = v.number_or("threshold", 100.0);
  c.validity.override = v.boolean_or("override", false);
  const Reader o = r.child("output");
  o.only({"dir"});
  c.output_dir = o.has("dir") ? o.text("dir") : "out/" + c.name;
  return c;
}

// ---- writing ----------------------------------------------------------------

std::string q(double v, const char* unit) { return io::format_double(v) + " " + unit; }

json system_json(const SystemSpec& s) {
  json j;
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ChainLatticeSpec>) {
          j = {{"type", "chain"}, {"sites", src.n_sites}, {"spacing", q(src.spacing, "A")}, {"angle", q(src.angle, "rad")},
               {"jitter", src.jitter}, {"seed", src.seed}};
        } else if constexpr (std::is_same_v<T, CubicLatticeSpec>) {
          j = {{"type", "cube"}, {"edge", src.m}, {"spacing", q(src.spacing, "A")}, {"jitter", src.jitter}, {"seed", src.seed}};
        } else if constexpr (std::is_same_v<T, PositionList>) {
          json rows = json::array();
          for (const auto& p : src.sites) rows.push_back({p.x(), p.y(), p.z()});
          j = {{"type", "positions"}, {"positions_angstrom", rows}};
        } else if constexpr (std::is_same_v<T, ExplicitCouplings>) {
          json A = json::array(), B = json::array(), d = json::array();
          for (double v : src.A) A.push_back(q(v, "rad/s"));
          for (double v : src.B) B.push_back(q(v, "rad/s"));
          for (const auto& p : src.d) d.push_back({p.k + 1, p.j + 1, q(p.d, "rad/s")});
          j = {{"type", "couplings"}, {"A", A}, {"B", B}, {"d", d}};
        } else {
          j = {{"type", "random-chain"}, {"nuclei", src.nuclei}, {"B_first", q(src.B_first, "rad/s")},
               {"d_mean", q(src.d_mean, "rad/s")}, {"d_sd", q(src.d_sd, "rad/s")}, {"seed", src.seed}};
        }
      },
      s.source);
  if (s.pair_cutoff) j["pair_cutoff"] = q(*s.pair_cutoff, "A");
  j["scale"] = {{"dipolar", s.dipolar_scale}, {"bulk_dipolar", s.bulk_dipolar_scale},
                {"first_pseudosecular", s.first_pseudosecular_scale}};
  return j;
}

json time_json(const TimeGridSpec& t) {
  switch (t.kind) {
    case TimeGridSpec::Kind::Linear: return {{"grid", "linear"}, {"stop", q(t.stop, "s")}, {"points", t.points}};
    case TimeGridSpec::Kind::Log:
      return {{"grid", "log"}, {"first", q(t.first, "s")}, {"stop", q(t.stop, "s")}, {"points", t.points}};
    case TimeGridSpec::Kind::Explicit: {
      json v = json::array();
      for (double x : t.values) v.push_back(q(x, "s"));
      return {{"grid", "explicit"}, {"values", v}};
    }
  }
  return {};
}

const char* method_name(qme::PropagationMethod m) {
  switch (m) {
    case qme::PropagationMethod::Spectral: return "spectral";
    case qme::PropagationMethod::Exponential: return "expm";
    case qme::PropagationMethod::RungeKutta: return "rk45";
  }
  return "spectral";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: not valid YAML/JSON: ") + e.what());
  }
  return parse_node(root, fs::current_path());
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
  YAML::Node root;
  try {
    root = YAML::Load(io::read_text(path));
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ": not valid YAML/JSON: " + e.what());
  }
  return parse_node(root, path.has_parent_path() ? path.parent_path() : fs::current_path());
}

json to_json(const ExperimentConfig& c) {
  const auto& p = c.physics;
  json physics = {{"nucleus", c.nucleus},          {"B0", q(p.B0, "T")},
                  {"temperature", q(p.temperature, "K")}, {"omega1", q(p.omega1, "rad/s")},
                  {"lambda", q(p.lambda, "rad/s")},      {"R1S", q(p.R1S, "s^-1")},
                  {"R2S", q(p.R2S, "s^-1")},             {"R1I", q(p.R1I, "s^-1")},
                  {"R2I", q(p.R2I, "s^-1")}};
  if (p.omegaI_override) physics["omegaI"] = q(*p.omegaI_override, "rad/s");
  const auto& s = c.simulation;
  json initial = {{"nuclei", s.initial_nuclei}};
  initial["electron"] = s.initial_electron ? json(*s.initial_electron) : json("thermal");
  json simulation = {{"trajectories", s.trajectories}, {"seed", s.seed}, {"workers", s.workers},
                     {"second_order", s.second_order}, {"time", time_json(s.time)}, {"initial", initial}};
  json reference = {{"enabled", c.reference.enabled}, {"method", method_name(c.reference.method)},
                    {"rel_tol", c.reference.rel_tol}, {"dump_generator", c.reference.dump_generator},
                    {"sigmas", c.reference.sigmas}};
  json diffusion = {{"enabled", c.diffusion.enabled},         {"cells", c.diffusion.cells},
                    {"levels", c.diffusion.levels},           {"origin_spin", c.diffusion.origin_spin},
                    {"skip_nuclei", c.diffusion.skip_nuclei},
                    {"transient_fraction", c.diffusion.transient_fraction}};
  switch (c.diffusion.source) {
    case DiffusionSpec::Source::Measured: diffusion["source"] = "measured"; break;
    case DiffusionSpec::Source::Plateau: diffusion["source"] = "plateau"; break;
    case DiffusionSpec::Source::Fixed: diffusion["source"] = c.diffusion.source_value; break;
  }
  return {{"name", c.name},
          {"physics", physics},
          {"system", system_json(c.system)},
          {"simulation", simulation},
          {"reference", reference},
          {"diffusion", diffusion},
          {"validity", {{"threshold", c.validity.threshold}, {"override", c.validity.override}}},
          {"output", {{"dir", c.output_dir}}}};
}

ExperimentConfig with_parameter(const ExperimentConfig& c, const std::string& path, const std::string& value) {
  json j = to_json(c);
  json* node = &j;
  std::istringstream parts(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) keys.push_back(key);
  if (keys.empty()) throw ConfigError("empty parameter path");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!node->is_object() || !node->contains(keys[i])) {
      throw ConfigError("parameter path '" + path + "' does not exist in the config schema");
    }
    node = &(*node)[keys[i]];
  }
  if (node->is_object() || node->is_array()) throw ConfigError("parameter path '" + path + "' is not a scalar");
  *node = value;
  // Scalars go back through the YAML parser, so "0.5" and "0 kHz" both work.
  return parse_node(YAML::Load(j.dump()), fs::current_path());
}

BuiltSystem build_system(const ExperimentConfig& c) {
  BuiltSystem b;
  b.params = c.physics;
  b.params.validate();
  const auto& sys = c.system;
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ChainLatticeSpec> || std::is_same_v<T, CubicLatticeSpec>) {
          b.geometry = generate_lattice(src);
          const double cutoff = sys.pair_cutoff.value_or(3.0 * src.spacing);
          b.couplings = compute_couplings(*b.geometry, b.params, cutoff);
        } else if constexpr (std::is_same_v<T, PositionList>) {
          b.geometry = Geometry(src.sites);
          b.couplings = compute_couplings(*b.geometry, b.params,
                                          sys.pair_cutoff.value_or(std::numeric_limits<double>::infinity()));
        } else if constexpr (std::is_same_v<T, ExplicitCouplings>) {
          std::vector<double> bsq;
          for (double v : src.B) bsq.push_back(v * v);
          b.couplings = Couplings(src.A, std::move(bsq), src.d);
        } else {
          Rng rng(src.seed);
          std::vector<double> A(src.nuclei, 0.0), bsq(src.nuclei, 0.0);
          bsq[0] = src.B_first * src.B_first;
          std::vector<DipolarPair> pairs;
          for (std::size_t k = 0; k + 1 < src.nuclei; ++k) {
            pairs.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k + 1),
                             src.d_mean + src.d_sd * standard_normal(rng)});
          }
          b.couplings = Couplings(std::move(A), std::move(bsq), std::move(pairs));
        }
      },
      sys.source);
  if (sys.dipolar_scale != 1.0) b.couplings = b.couplings.with_dipolar_scaled(sys.dipolar_scale);
  if (sys.bulk_dipolar_scale != 1.0) b.couplings = b.couplings.with_dipolar_scaled(sys.bulk_dipolar_scale, true);
  if (sys.first_pseudosecular_scale != 1.0 && b.couplings.n_nuclei() > 0) {
    b.couplings = b.couplings.with_pseudosecular_scaled(0, sys.first_pseudosecular_scale);
  }
  return b;
}

}  // namespace dnpsim::experiments
