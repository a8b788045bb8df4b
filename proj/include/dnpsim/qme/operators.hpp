#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>

namespace dnpsim::qme {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest spin count the dense reference accepts.
inline constexpr std::size_t max_spins = 6;

/// Spin-1/2 operators on the 2^N product basis.
///
/// Basis ordering: spin 0 (the electron) is the most significant tensor
/// factor and "up" is the first state of each factor, so basis index a has
/// bit (N-1-s) set exactly when spin s is down. This matches
/// kmc::Configuration::index().
class SpinBasis {
 public:
  explicit SpinBasis(std::size_t n_spins);

  std::size_t n_spins() const { return n_; }
  std::size_t dim() const { return dim_; }

  CMatrix sz(std::size_t s) const;
  CMatrix splus(std::size_t s) const;
  CMatrix sminus(std::size_t s) const;
  CMatrix identity() const { return CMatrix::Identity(dim(), dim()); }

  /// m_s = +-1/2 of spin s in basis state a.
  double m(std::size_t a, std::size_t s) const;
  /// Number of up spins in basis state a.
  int ups(std::size_t a) const;

 private:
  CMatrix embed(const Eigen::Matrix2cd& single, std::size_t s) const;
  std::size_t n_;
  std::size_t dim_;
};

/// Superoperators act on column-stacked operators: vec(A X B) = (B^T kron A) vec(X).
enum class SuperKind { Commutator, Dissipator, ThermalCorrection, Relaxation, Liouvillian, Other };

struct Superoperator {
  CMatrix m;
  SuperKind kind = SuperKind::Other;
};

CMatrix left_multiply(const CMatrix& a);   // X -> A X
CMatrix right_multiply(const CMatrix& b);  // X -> X B
/// X -> [H, X]
Superoperator commutator(const CMatrix& h);
/// X -> L X L^dag - {X, L^dag L}/2
Superoperator dissipator(const CMatrix& l);

CVector vectorize(const CMatrix& rho);
CMatrix unvectorize(const CVector& v, std::size_t dim);

/// Position of |a><b| in the column-stacked vector.
inline std::size_t vec_index(std::size_t a, std::size_t b, std::size_t dim) { return a + b * dim; }

}  // namespace dnpsim::qme
