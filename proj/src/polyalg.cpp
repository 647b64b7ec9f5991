#include "hitchin/polyalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "hitchin/errors.hpp"

namespace hitchin {

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

ComplexPoly::ComplexPoly(std::initializer_list<cplx> coeffs) : coeffs_(coeffs) { normalize(); }

void ComplexPoly::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
}

ComplexPoly ComplexPoly::monomial(cplx c, int k) {
  std::vector<cplx> v(static_cast<size_t>(k) + 1, 0.0);
  v.back() = c;
  return ComplexPoly(std::move(v));
}

ComplexPoly ComplexPoly::from_roots(std::span<const cplx> roots, cplx lead) {
  std::vector<cplx> v{lead};
  for (const cplx r : roots) {
    v.push_back(0.0);
    for (size_t k = v.size() - 1; k > 0; --k) v[k] = v[k - 1] - r * v[k];
    v[0] = -r * v[0];
  }
  return ComplexPoly(std::move(v));
}

cplx ComplexPoly::operator[](int k) const {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<size_t>(k)];
}

cplx ComplexPoly::leading() const { return coeffs_.empty() ? cplx(0.0) : coeffs_.back(); }

double ComplexPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const cplx c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

cplx ComplexPoly::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<cplx> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return ComplexPoly(std::move(d));
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  normalize();
  return *this;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  normalize();
  return *this;
}

ComplexPoly& ComplexPoly::operator*=(cplx s) {
  for (cplx& c : coeffs_) c *= s;
  normalize();
  return *this;
}

ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<cplx> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return ComplexPoly(std::move(v));
}

void sort_roots(std::span<cplx> roots) {
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::array<cplx, 2> quadratic_roots(cplx c0, cplx c1, cplx c2) {
  const cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
  // pick the sign that adds magnitudes in -c1 ± disc
  const cplx q = (std::real(std::conj(c1) * disc) >= 0.0) ? -0.5 * (c1 + disc) : -0.5 * (c1 - disc);
  if (q == cplx(0.0)) return {cplx(0.0), cplx(0.0)};
  return {q / c2, c0 / q};
}

std::array<cplx, 3> cubic_roots_radicals(cplx c0, cplx c1, cplx c2, cplx c3) {
  const cplx a = c2 / c3, b = c1 / c3, c = c0 / c3;
  // t = z - a/3:  z^3 + p z + q = 0
  const cplx p = b - a * a / 3.0;
  const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cplx shift = -a / 3.0;

  const cplx sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx w = -q / 2.0 + sq;
  const cplx w2 = -q / 2.0 - sq;
  if (std::abs(w2) > std::abs(w)) w = w2;

  if (w == cplx(0.0)) return {shift, shift, shift};
  const cplx u = std::pow(w, 1.0 / 3.0);
  const cplx v = -p / (3.0 * u);
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  const cplx omega2 = std::conj(omega);
  return {u + v + shift, omega * u + omega2 * v + shift, omega2 * u + omega * v + shift};
}

std::array<cplx, 4> quartic_roots_radicals(cplx c0, cplx c1, cplx c2, cplx c3, cplx c4) {
  const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), std::abs(c3), std::abs(c4)});
  if (std::abs(c4) == 0.0 || std::abs(c4) < 1e-13 * scale)
    throw Error(ErrorCode::DegenerateLeadingCoefficient, "quartic leading coefficient vanishes");

  const cplx a = c3 / c4, b = c2 / c4, c = c1 / c4, d = c0 / c4;
  // t = u - a/4:  u^4 + p u^2 + q u + r = 0
  const cplx a2 = a * a;
  const cplx p = b - 3.0 * a2 / 8.0;
  const cplx q = c - a * b / 2.0 + a2 * a / 8.0;
  const cplx r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
  const cplx shift = -a / 4.0;

  // (u^2 + p/2 + m)^2 = 2m u^2 - q u + (m^2 + p m + p^2/4 - r) is a perfect
  // square in u exactly when 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0.
  const auto cubic = cubic_roots_radicals(-q * q, 2.0 * p * p - 8.0 * r, 8.0 * p, 8.0);
  cplx m = cubic[0];
  for (const cplx z : cubic)
    if (std::abs(z) > std::abs(m)) m = z;

  std::array<cplx, 4> roots;
  const cplx s = std::sqrt(2.0 * m);
  if (std::abs(s) <= 1e-300) {
    // q = 0: biquadratic u^4 + p u^2 + r
    const auto mu = quadratic_roots(r, p, 1.0);
    const cplx u1 = std::sqrt(mu[0]), u2 = std::sqrt(mu[1]);
    roots = {u1, -u1, u2, -u2};
  } else {
    const cplx k = p / 2.0 + m;
    const cplx h = q / (2.0 * s);
    // u^2 - s u + (k + h) = 0  and  u^2 + s u + (k - h) = 0
    const auto r1 = quadratic_roots(k + h, -s, 1.0);
    const auto r2 = quadratic_roots(k - h, s, 1.0);
    roots = {r1[0], r1[1], r2[0], r2[1]};
  }
  for (cplx& z : roots) z += shift;
  sort_roots(roots);
  return roots;
}

namespace {

cplx polish(const ComplexPoly& p, const ComplexPoly& dp, cplx z) {
  double res = std::abs(p(z));
  for (int it = 0; it < 3 && res > 0.0; ++it) {
    const cplx d = dp(z);
    if (d == cplx(0.0)) break;
    const cplx next = z - p(z) / d;
    const double next_res = std::abs(p(next));
    if (!(next_res < res)) break;
    z = next;
    res = next_res;
  }
  return z;
}

}  // namespace

std::vector<cplx> companion_roots(const ComplexPoly& p) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "all coefficients vanish");
  const int n = p.degree();
  if (n < 1) return {};

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  const cplx lead = p.leading();
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / lead;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
  const ComplexPoly dp = p.derivative();
  std::vector<cplx> roots(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) roots[static_cast<size_t>(i)] = polish(p, dp, solver.eigenvalues()(i));
  sort_roots(roots);
  return roots;
}

std::vector<cplx> low_degree_roots(const ComplexPoly& p) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "all coefficients vanish");
  if (p.degree() == 4) {
    try {
      const auto r = quartic_roots_radicals(p[0], p[1], p[2], p[3], p[4]);
      return {r.begin(), r.end()};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateLeadingCoefficient) throw;
      return low_degree_roots(ComplexPoly({p[0], p[1], p[2], p[3]}));
    }
  }
  return companion_roots(p);
}

}  // namespace hitchin
