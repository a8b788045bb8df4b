#pragma once

#include "dnpsim/diffusion/diffusion.hpp"
#include "dnpsim/qme/liouvillian.hpp"
#include "dnpsim/spin_system.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dnpsim::experiments {

struct TimeGridSpec {
  enum class Kind { Linear, Log, Explicit };
  Kind kind = Kind::Linear;
  double first = 0.0;  // log grids: first nonzero time
  double stop = 1.0;
  std::size_t points = 11;
  std::vector<double> values;  // explicit grids

  std::vector<double> build() const;
};

/// Couplings given directly (A and |B| in rad/s, pairs with 0-based nuclei).
struct ExplicitCouplings {
  std::vector<double> A;
  std::vector<double> B;
  std::vector<DipolarPair> d;
};

/// Chain with only nearest-neighbour couplings: d_k drawn from a normal
/// distribution, A = 0, and a pseudosecular coupling on the first nucleus only.
struct RandomChainCouplings {
  std::size_t nuclei = 40;
  double B_first = 0.0;  // rad/s
  double d_mean = 0.0;   // rad/s
  double d_sd = 0.0;     // rad/s
  std::uint64_t seed = 1;
};

struct PositionList {
  std::vector<Vec3> sites;  // A, electron first
  std::string file;         // source file, when read from one
};

using SystemSource =
    std::variant<CubicLatticeSpec, ChainLatticeSpec, PositionList, ExplicitCouplings, RandomChainCouplings>;

struct SystemSpec {
  SystemSource source = ChainLatticeSpec{};
  std::optional<double> pair_cutoff;  // A; lattices default to 3 x spacing
  double dipolar_scale = 1.0;         // every d_kj
  double bulk_dipolar_scale = 1.0;    // d_kj not touching the first nucleus
  double first_pseudosecular_scale = 1.0;  // |B| of the first nucleus
};

struct SimulationSpec {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool second_order = false;
  TimeGridSpec time;
  std::optional<double> initial_electron;  // default -P0
  double initial_nuclei = 0.0;
};

struct ReferenceSpec {
  bool enabled = false;
  qme::PropagationMethod method = qme::PropagationMethod::Spectral;
  double rel_tol = 1e-8;
  bool dump_generator = false;
  double sigmas = 3.0;  // comparison tolerance against kMC
};

struct DiffusionSpec {
  bool enabled = false;
  std::size_t cells = 300;
  std::vector<double> levels{0.2, 0.4, 0.6, 0.8};  // fractions of the source level
  /// Dirichlet value at the origin: the origin spin's own kMC polarization
  /// (Measured), its late-time plateau held constant (Plateau), or a fixed
  /// polarization (Fixed, `source_value`). Profiles are divided by the plateau,
  /// or by `source_value` for Fixed.
  enum class Source { Measured, Plateau, Fixed };
  Source source = Source::Measured;
  double source_value = 0.0;
  std::size_t origin_spin = 2;   // series column placed at x = 0 (1 = first nucleus)
  std::size_t skip_nuclei = 2;   // nuclei nearest the electron left out of the metric
  double transient_fraction = 0.1;  // crossings earlier than this fraction of the span are ignored
};

struct ValiditySpec {
  double threshold = 100.0;
  bool override = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string nucleus = "13C";
  PhysicalParams physics;
  SystemSpec system;
  SimulationSpec simulation;
  ReferenceSpec reference;
  DiffusionSpec diffusion;
  ValiditySpec validity;
  std::string output_dir = "out";
};

/// Parses YAML text (JSON manifests are accepted too: their "config" member
/// is used). Every frequency, time, field, length and angle needs a unit.
/// Throws ConfigError with the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical form with internal units spelled out ("... rad/s", "... s^-1");
/// parse_config(to_json(c).dump()) reproduces c exactly.
nlohmann::json to_json(const ExperimentConfig& c);

/// Replaces the value at a dotted path (e.g. "system.scale.bulk_dipolar") of
/// the canonical form and re-parses. Throws ConfigError if the path does not exist.
ExperimentConfig with_parameter(const ExperimentConfig& c, const std::string& path, const std::string& value);

/// Physical system resolved from a config.
struct BuiltSystem {
  PhysicalParams params;
  std::optional<Geometry> geometry;
  Couplings couplings;
};

BuiltSystem build_system(const ExperimentConfig& c);

}  // namespace dnpsim::experiments
