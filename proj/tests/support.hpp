#pragma once

#include "dnpsim/spin_system.hpp"
#include "dnpsim/units.hpp"

#include <cmath>
#include <vector>

namespace dnpsim::testing {

inline constexpr double two_pi = constants::two_pi;

/// 13C at 3.4 T and 1 K with the rates of the 1330-spin cube.
inline PhysicalParams carbon_params() {
  PhysicalParams p;
  p.B0 = 3.4;
  p.temperature = 1.0;
  p.gamma_e = constants::gamma_e;
  p.gamma_n = constants::gamma_13C;
  p.omega1 = two_pi * 100e3;
  p.R1S = 1.0;
  p.R2S = 1e5;
  p.R1I = 1.4e-4;
  p.R2I = 1e4;
  return p;
}

/// Protons, 50 kHz drive, T1e 1 s, T2e 10 us, T1n 1 h, T2n 5 ms.
inline PhysicalParams proton_params() {
  PhysicalParams p;
  p.B0 = 3.4;
  p.temperature = 1.0;
  p.gamma_e = constants::gamma_e;
  p.gamma_n = constants::gamma_1H;
  p.omega1 = two_pi * 50e3;
  p.R1S = 1.0;
  p.R2S = 1e5;
  p.R1I = 1.0 / 3600.0;
  p.R2I = 200.0;
  return p;
}

/// The tabulated four-proton network (kHz values converted to rad/s).
inline Couplings four_proton_couplings() {
  const double k = two_pi * 1e3;
  std::vector<double> A{318 * k, 794 * k, -352 * k, -1260 * k};
  std::vector<double> B{935 * k, 822 * k, 92.1 * k, 22.2 * k};
  std::vector<double> Bsq;
  for (double b : B) Bsq.push_back(b * b);
  std::vector<DipolarPair> d{{0, 1, -0.055 * k}, {0, 2, -0.660 * k}, {0, 3, 0.048 * k},
                             {1, 2, 0.037 * k},  {1, 3, -1.040 * k}, {2, 3, 0.059 * k}};
  return Couplings(std::move(A), std::move(Bsq), std::move(d));
}

/// Couplings with every entry given (rad/s); pairs in (0,1), (0,2), (1,2)... order.
inline Couplings make_couplings(std::vector<double> A, std::vector<double> B, std::vector<double> d = {}) {
  std::vector<double> Bsq;
  for (double b : B) Bsq.push_back(b * b);
  std::vector<DipolarPair> pairs;
  std::size_t i = 0;
  for (std::uint32_t k = 0; k < A.size(); ++k) {
    for (std::uint32_t j = k + 1; j < A.size(); ++j) {
      if (i < d.size()) pairs.push_back({k, j, d[i]});
      ++i;
    }
  }
  return Couplings(std::move(A), std::move(Bsq), std::move(pairs));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace dnpsim::testing
