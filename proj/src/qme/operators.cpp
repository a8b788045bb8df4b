#include "dnpsim/qme/operators.hpp"

#include "dnpsim/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <bit>

namespace dnpsim::qme {

SpinBasis::SpinBasis(std::size_t n_spins) : n_(n_spins), dim_(std::size_t{1} << n_spins) {
  if (n_spins == 0) throw SpecError("spin basis needs at least one spin");
  if (n_spins > max_spins) throw CapacityError("dense quantum reference supports at most 6 spins");
}

CMatrix SpinBasis::embed(const Eigen::Matrix2cd& single, std::size_t s) const {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t q = 0; q < n_; ++q) {
    const CMatrix factor = q == s ? CMatrix(single) : CMatrix(CMatrix::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

CMatrix SpinBasis::sz(std::size_t s) const {
  Eigen::Matrix2cd op;
  op << 0.5, 0.0, 0.0, -0.5;
  return embed(op, s);
}

CMatrix SpinBasis::splus(std::size_t s) const {
  Eigen::Matrix2cd op;
  op << 0.0, 1.0, 0.0, 0.0;  // |up><down|
  return embed(op, s);
}

CMatrix SpinBasis::sminus(std::size_t s) const { return splus(s).adjoint(); }

double SpinBasis::m(std::size_t a, std::size_t s) const {
  return (a >> (n_ - 1 - s)) & 1U ? -0.5 : 0.5;
}

int SpinBasis::ups(std::size_t a) const {
  return static_cast<int>(n_) - std::popcount(static_cast<unsigned long long>(a));
}

CMatrix left_multiply(const CMatrix& a) {
  return Eigen::kroneckerProduct(CMatrix::Identity(a.rows(), a.rows()), a);
}

CMatrix right_multiply(const CMatrix& b) {
  return Eigen::kroneckerProduct(b.transpose(), CMatrix::Identity(b.rows(), b.rows()));
}

Superoperator commutator(const CMatrix& h) {
  return {left_multiply(h) - right_multiply(h), SuperKind::Commutator};
}

Superoperator dissipator(const CMatrix& l) {
  const CMatrix ldl = l.adjoint() * l;
  CMatrix m = Eigen::kroneckerProduct(l.conjugate(), l);
  m -= 0.5 * (left_multiply(ldl) + right_multiply(ldl));
  return {std::move(m), SuperKind::Dissipator};
}

CVector vectorize(const CMatrix& rho) {
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvectorize(const CVector& v, std::size_t dim) {
  return Eigen::Map<const CMatrix>(v.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

}  // namespace dnpsim::qme
