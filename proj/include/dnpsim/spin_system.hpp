#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dnpsim {

/// Field, temperature, drive and relaxation for one electron plus nuclei.
///
/// Frequencies are angular (rad/s), relaxation rates plain s^-1. The rotating
/// frame is the one of the master equation: `lambda` is the microwave offset
/// from the double-quantum transition.
struct PhysicalParams {
  double B0 = 3.4;             // T
  double temperature = 1.0;    // K
  double gamma_e = 0.0;        // rad s^-1 T^-1 (magnitude is used)
  double gamma_n = 0.0;        // rad s^-1 T^-1 (magnitude is used)
  double omega1 = 0.0;         // microwave amplitude, rad/s
  double lambda = 0.0;         // resonance offset, rad/s
  double R1S = 0.0, R2S = 0.0, R1I = 0.0, R2I = 0.0;  // s^-1
  /// Nuclear Larmor frequency given directly instead of |gamma_n| B0.
  std::optional<double> omegaI_override;

  double omegaS() const;
  double omegaI() const;
  /// Thermal electron polarization tanh(hbar omegaS / 2 k_B T).
  double P0() const;

  /// Throws DomainError when a rate is negative or B0/temperature is not positive.
  void validate() const;
};

double thermal_polarization(const PhysicalParams& params);

using Vec3 = Eigen::Vector3d;

/// Site positions in angstrom. Index 0 is the electron, 1..n the nuclei.
class Geometry {
 public:
  Geometry() = default;
  /// Throws GeometryError for non-finite coordinates or sites closer than 0.1 A.
  explicit Geometry(std::vector<Vec3> positions);

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& electron() const { return positions_.front(); }
  const Vec3& nucleus(std::size_t k) const { return positions_[k + 1]; }
  std::size_t n_nuclei() const { return positions_.empty() ? 0 : positions_.size() - 1; }
  static constexpr std::size_t electron_index = 0;

 private:
  std::vector<Vec3> positions_;
};

struct DipolarPair {
  std::uint32_t k = 0;  // nucleus index, k < j
  std::uint32_t j = 0;
  double d = 0.0;       // rad/s, signed
};

/// Hyperfine and internuclear coupling constants, nuclei indexed 0..n-1.
///
/// `Bsq[k]` is B_{k+} B_{k-} = |B_k|^2; the pseudosecular phase never enters
/// a rate, so it is not kept. Dipolar pairs are stored once with k < j and
/// looked up symmetrically.
class Couplings {
 public:
  Couplings() = default;
  Couplings(std::vector<double> A, std::vector<double> Bsq, std::vector<DipolarPair> pairs);

  std::size_t n_nuclei() const { return A_.size(); }
  std::span<const double> A() const { return A_; }
  std::span<const double> Bsq() const { return Bsq_; }
  double A(std::size_t k) const { return A_[k]; }
  double Bsq(std::size_t k) const { return Bsq_[k]; }
  std::span<const DipolarPair> pairs() const { return pairs_; }
  /// d_kj for k != j, zero when the pair is absent.
  double dipolar(std::size_t k, std::size_t j) const;

  /// Copy with every d scaled by `factor`; `bulk_only` leaves pairs touching nucleus 0 alone.
  Couplings with_dipolar_scaled(double factor, bool bulk_only = false) const;
  /// Copy with |B_k| scaled by `factor` for nucleus k.
  Couplings with_pseudosecular_scaled(std::size_t k, double factor) const;

 private:
  std::vector<double> A_;
  std::vector<double> Bsq_;
  std::vector<DipolarPair> pairs_;  // sorted by (k, j)
};

/// Point-dipole couplings; B0 is along z.
///
///   A_k    = C_en (3 cos^2 th - 1) / r^3
///   |B_k|  = C_en  3 sin th cos th / r^3
///   d_kj   = C_nn (1 - 3 cos^2 th) / (2 r^3)
///
/// with C_en = (mu0/4pi) gamma_e gamma_n hbar and C_nn = (mu0/4pi) gamma_n^2 hbar.
/// Pairs farther apart than `pair_cutoff` (angstrom) are dropped.
Couplings compute_couplings(const Geometry& geom, const PhysicalParams& params,
                            double pair_cutoff = std::numeric_limits<double>::infinity());

struct CubicLatticeSpec {
  int m = 11;              // sites per edge, odd
  double spacing = 10.0;   // A
  double jitter = 0.0;     // fraction of spacing, [0, 0.5)
  std::uint64_t seed = 1;
};

struct ChainLatticeSpec {
  int n_sites = 31;        // electron included
  double spacing = 5.0;    // A
  double angle = 0.0;      // rad, chain axis to B0
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

using LatticeSpec = std::variant<CubicLatticeSpec, ChainLatticeSpec>;

/// Cubic grid with the electron on the central site, or a chain with the
/// electron at one end. Nuclei get an independent uniform displacement in
/// [-jitter*spacing, jitter*spacing] per coordinate; the electron is not moved.
Geometry generate_lattice(const LatticeSpec& spec);

struct ValidityReport {
  double lhs = 0.0;        // min{(2 R2I)^2, (R2S + R2I)^2}
  double rhs = 0.0;        // max{d^2/4, |w1 B|^2/(16 wI^2), R1S^2, R1I^2}
  double ratio = 0.0;      // lhs / rhs, +inf when rhs == 0
  double threshold = 100.0;
  bool pass = false;
  std::string dominant;    // which rhs term is largest
  double epsilon = 0.0;    // max(coupling, rate) / omegaI
};

ValidityReport validate_adiabatic(const PhysicalParams& params, const Couplings& c,
                                  double threshold = 100.0);

}  // namespace dnpsim
