#include "dampedwave/linalg.hpp"

#include "dampedwave/errors.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <cmath>
#include <string>

namespace dampedwave {

CVector Tridiagonal::apply(std::span<const cplx> x) const
{
  const std::size_t n = size();
  CVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = diag[i] * x[i];
    if (i > 0)
      acc += lower[i - 1] * x[i - 1];
    if (i + 1 < n)
      acc += upper[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

Tridiagonal Tridiagonal::adjoint() const
{
  Tridiagonal out;
  out.diag.resize(diag.size());
  out.lower.resize(upper.size());
  out.upper.resize(lower.size());
  for (std::size_t i = 0; i < diag.size(); ++i)
    out.diag[i] = std::conj(diag[i]);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    out.lower[i] = std::conj(upper[i]);
    out.upper[i] = std::conj(lower[i]);
  }
  return out;
}

TridiagonalLU::TridiagonalLU(const Tridiagonal& matrix)
    : lower_(matrix.lower), diag_(matrix.diag), upper_(matrix.upper)
{
  const auto n = static_cast<lapack_int>(diag_.size());
  if (n == 0 || lower_.size() + 1 != diag_.size() || upper_.size() + 1 != diag_.size())
    throw DomainError("TridiagonalLU: inconsistent diagonal lengths");
  upper2_.assign(diag_.size() > 2 ? diag_.size() - 2 : 1, cplx{});
  pivots_.assign(diag_.size(), 0);
  const lapack_int info = LAPACKE_zgttrf(
      n, reinterpret_cast<lapack_complex_double*>(lower_.data()),
      reinterpret_cast<lapack_complex_double*>(diag_.data()),
      reinterpret_cast<lapack_complex_double*>(upper_.data()),
      reinterpret_cast<lapack_complex_double*>(upper2_.data()), pivots_.data());
  if (info != 0)
    throw DiscretizationError("tridiagonal factorization failed (singular matrix), info = " +
                              std::to_string(info));
}

void TridiagonalLU::solve_impl(char trans, std::span<cplx> rhs) const
{
  const auto n = static_cast<lapack_int>(diag_.size());
  if (rhs.size() != diag_.size())
    throw DomainError("TridiagonalLU::solve: size mismatch");
  // gttrs does not modify the factors; the casts drop const for the C interface only
  const lapack_int info = LAPACKE_zgttrs(
      LAPACK_COL_MAJOR, trans, n, 1,
      reinterpret_cast<const lapack_complex_double*>(lower_.data()),
      reinterpret_cast<const lapack_complex_double*>(diag_.data()),
      reinterpret_cast<const lapack_complex_double*>(upper_.data()),
      reinterpret_cast<const lapack_complex_double*>(upper2_.data()), pivots_.data(),
      reinterpret_cast<lapack_complex_double*>(rhs.data()), n);
  if (info != 0)
    throw DiscretizationError("tridiagonal solve failed, info = " + std::to_string(info));
}

void TridiagonalLU::solve(std::span<cplx> rhs) const { solve_impl('N', rhs); }

void TridiagonalLU::solve_adjoint(std::span<cplx> rhs) const { solve_impl('C', rhs); }

CVector solve_tridiagonal(const Tridiagonal& matrix, CVector rhs)
{
  TridiagonalLU lu(matrix);
  lu.solve(rhs);
  return rhs;
}

double lowest_symmetric_eigenvalue(std::span<const double> diag, std::span<const double> off)
{
  const auto n = static_cast<lapack_int>(diag.size());
  if (n == 0 || off.size() + 1 != diag.size())
    throw DomainError("lowest_symmetric_eigenvalue: inconsistent sizes");
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  if (e.empty())
    e.push_back(0.0);
  std::vector<double> w(diag.size());
  std::vector<lapack_int> iblock(diag.size()), isplit(diag.size());
  lapack_int found = 0;
  lapack_int nsplit = 0;
  const lapack_int info =
      LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, 1, 0.0, d.data(), e.data(), &found, &nsplit,
                     w.data(), iblock.data(), isplit.data());
  if (info != 0 || found < 1)
    throw DiscretizationError("symmetric tridiagonal bisection failed");
  return w[0];
}

double dense_min_singular_value(const Tridiagonal& matrix)
{
  const auto n = static_cast<Eigen::Index>(matrix.size());
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dense(i, i) = matrix.diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      dense(i + 1, i) = matrix.lower[static_cast<std::size_t>(i)];
      dense(i, i + 1) = matrix.upper[static_cast<std::size_t>(i)];
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense);
  return svd.singularValues()(n - 1);
}

double l2_norm(std::span<const cplx> v)
{
  double s = 0.0;
  for (const auto& z : v)
    s += std::norm(z);
  return std::sqrt(s);
}

} // namespace dampedwave
