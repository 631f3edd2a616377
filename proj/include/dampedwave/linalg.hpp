#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dampedwave {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Complex tridiagonal matrix stored by diagonals. lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct Tridiagonal {
  CVector lower;
  CVector diag;
  CVector upper;

  std::size_t size() const { return diag.size(); }
  CVector apply(std::span<const cplx> x) const;
  /// Conjugate transpose.
  Tridiagonal adjoint() const;
};

/// LU factorization with partial pivoting (LAPACK gttrf), reusable for many right-hand sides.
class TridiagonalLU {
public:
  explicit TridiagonalLU(const Tridiagonal& matrix);

  /// Solves A x = rhs in place.
  void solve(std::span<cplx> rhs) const;
  /// Solves A^H x = rhs in place.
  void solve_adjoint(std::span<cplx> rhs) const;

  std::size_t size() const { return diag_.size(); }

private:
  void solve_impl(char trans, std::span<cplx> rhs) const;

  CVector lower_;
  CVector diag_;
  CVector upper_;
  CVector upper2_;
  std::vector<int> pivots_;
};

/// One-shot solve of A x = rhs.
CVector solve_tridiagonal(const Tridiagonal& matrix, CVector rhs);

/// Smallest eigenvalue of the real symmetric tridiagonal matrix (diag, off) by bisection
/// (LAPACK stebz).
double lowest_symmetric_eigenvalue(std::span<const double> diag, std::span<const double> off);

/// Smallest singular value of a tridiagonal matrix from a dense SVD. Only for modest sizes.
double dense_min_singular_value(const Tridiagonal& matrix);

double l2_norm(std::span<const cplx> v);

} // namespace dampedwave
