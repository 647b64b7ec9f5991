#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace hitchin {

using cplx = std::complex<double>;

/// Univariate polynomial with complex coefficients, stored in ascending
/// degree order. Trailing zero coefficients are stripped on construction, so
/// the leading coefficient is nonzero unless the polynomial is identically 0.
class ComplexPoly {
 public:
  ComplexPoly() = default;
  explicit ComplexPoly(std::vector<cplx> coeffs);
  ComplexPoly(std::initializer_list<cplx> coeffs);

  static ComplexPoly monomial(cplx c, int k);
  /// lead · Π (t - r)
  static ComplexPoly from_roots(std::span<const cplx> roots, cplx lead = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::span<const cplx> coeffs() const { return coeffs_; }
  /// Coefficient of t^k; zero beyond the degree.
  cplx operator[](int k) const;
  cplx leading() const;
  double max_abs_coeff() const;

  /// Horner evaluation.
  cplx operator()(cplx z) const;
  ComplexPoly derivative() const;

  ComplexPoly& operator+=(const ComplexPoly& o);
  ComplexPoly& operator-=(const ComplexPoly& o);
  ComplexPoly& operator*=(cplx s);

  friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
  friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
  friend ComplexPoly operator*(ComplexPoly a, cplx s) { return a *= s; }
  friend ComplexPoly operator*(cplx s, ComplexPoly a) { return a *= s; }
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b);
  friend bool operator==(const ComplexPoly&, const ComplexPoly&) = default;

 private:
  void normalize();
  std::vector<cplx> coeffs_;
};

/// All four roots of c4 t^4 + c3 t^3 + c2 t^2 + c1 t + c0 by Ferrari's
/// resolvent-cubic construction, sorted lexicographically by (re, im).
/// Throws DegenerateLeadingCoefficient when |c4| < 1e-13 · max|c_k|.
std::array<cplx, 4> quartic_roots_radicals(cplx c0, cplx c1, cplx c2, cplx c3, cplx c4);

/// Roots of c3 t^3 + c2 t^2 + c1 t + c0 by Cardano's formula (c3 != 0).
std::array<cplx, 3> cubic_roots_radicals(cplx c0, cplx c1, cplx c2, cplx c3);

/// Roots of c2 t^2 + c1 t + c0 without cancellation (c2 != 0).
std::array<cplx, 2> quadratic_roots(cplx c0, cplx c1, cplx c2);

/// Eigenvalues of the companion matrix, each refined by guarded Newton steps
/// on p, sorted lexicographically by (re, im). Throws ZeroPolynomial.
std::vector<cplx> companion_roots(const ComplexPoly& p);

/// Roots of a polynomial of any degree <= 4 (radical formulas for degree 4,
/// companion matrix below). Used by callers that must fall back when the
/// leading coefficient of a nominal quartic vanishes.
std::vector<cplx> low_degree_roots(const ComplexPoly& p);

/// Lexicographic (re, im) ordering used for all root lists.
void sort_roots(std::span<cplx> roots);

}  // namespace hitchin
