#include "hitchin/spectral.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>

#include "hitchin/errors.hpp"

namespace hitchin {

char family_letter(Family f) {
  switch (f) {
    case Family::A: return 'A';
    case Family::B: return 'B';
    case Family::C: return 'C';
    case Family::D: return 'D';
  }
  return '?';
}

Family parse_family(const std::string& s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  throw Error(ErrorCode::UnsupportedFamily, "unknown root-system family '" + s + "'");
}

RootSystem RootSystem::make(Family family, int rank) {
  const int min_rank = family == Family::D ? 2 : 1;
  if (rank < min_rank)
    throw Error(ErrorCode::UnsupportedFamily, std::string(1, family_letter(family)) + std::to_string(rank) +
                                                  " is not a supported root system");
  return RootSystem{family, rank};
}

std::vector<InvariantDegree> invariant_degrees(RootSystem roots) {
  const int n = roots.rank;
  std::vector<InvariantDegree> out;
  switch (roots.family) {
    case Family::A:
      for (int d = 2; d <= n + 1; ++d) out.push_back({d, false});
      break;
    case Family::B:
    case Family::C:
      for (int i = 1; i <= n; ++i) out.push_back({2 * i, false});
      break;
    case Family::D:
      out.push_back({n, true});
      for (int i = 1; i <= n - 1; ++i) out.push_back({2 * i, false});
      break;
  }
  return out;
}

int lie_algebra_dimension(RootSystem roots) {
  const int n = roots.rank;
  switch (roots.family) {
    case Family::A: return (n + 1) * (n + 1) - 1;
    case Family::B:
    case Family::C: return n * (2 * n + 1);
    case Family::D: return n * (2 * n - 1);
  }
  return 0;
}

int standard_rep_dimension(RootSystem roots) {
  const int n = roots.rank;
  switch (roots.family) {
    case Family::A: return n + 1;
    case Family::B: return 2 * n + 1;
    case Family::C:
    case Family::D: return 2 * n;
  }
  return 0;
}

int hamiltonian_count(RootSystem roots, int genus) {
  if (genus < 2) throw Error(ErrorCode::InvalidArgument, "genus must be >= 2");
  return lie_algebra_dimension(roots) * (genus - 1);
}

std::vector<BlockShape> block_shapes(RootSystem roots, int genus) {
  if (genus < 2) throw Error(ErrorCode::InvalidArgument, "genus must be >= 2");
  const int nrep = standard_rep_dimension(roots);
  std::vector<BlockShape> shapes;
  int offset = 0;
  for (const InvariantDegree inv : invariant_degrees(roots)) {
    BlockShape s;
    s.invariant = inv;
    s.h0_count = inv.degree * (genus - 1) + 1;
    s.h1_count = std::max(0, (inv.degree - 1) * (genus - 1) - 1);
    s.lambda_power = inv.pfaffian ? 0 : nrep - inv.degree;
    s.offset = offset;
    offset += s.h0_count + s.h1_count;
    shapes.push_back(s);
  }
  return shapes;
}

int expansion_term_count(RootSystem roots, int genus) {
  int total = 0;
  for (const BlockShape& s : block_shapes(roots, genus)) total += s.h0_count + s.h1_count;
  return total;
}

// HamiltonianVector ---------------------------------------------------------

HamiltonianVector::HamiltonianVector(RootSystem roots, int genus, std::vector<HamiltonianBlock> blocks)
    : roots_(roots), genus_(genus), shapes_(block_shapes(roots, genus)) {
  if (blocks.size() != shapes_.size())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(shapes_.size()) + " invariant blocks, got " +
                                              std::to_string(blocks.size()));
  for (const BlockShape& s : shapes_) {
    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const HamiltonianBlock& b) { return b.invariant == s.invariant; });
    const std::string name = std::string(s.invariant.pfaffian ? "pfaffian " : "") + "block of degree " +
                             std::to_string(s.invariant.degree);
    if (it == blocks.end()) throw Error(ErrorCode::ShapeMismatch, "missing " + name);
    if (static_cast<int>(it->h0.size()) != s.h0_count || static_cast<int>(it->h1.size()) != s.h1_count)
      throw Error(ErrorCode::ShapeMismatch, name + ": expected " + std::to_string(s.h0_count) + " h0 and " +
                                                std::to_string(s.h1_count) + " h1 coefficients, got " +
                                                std::to_string(it->h0.size()) + " and " +
                                                std::to_string(it->h1.size()));
    blocks_.push_back(*it);
  }
}

HamiltonianVector HamiltonianVector::zeros(RootSystem roots, int genus) {
  std::vector<HamiltonianBlock> blocks;
  for (const BlockShape& s : block_shapes(roots, genus))
    blocks.push_back({s.invariant, std::vector<cplx>(s.h0_count, 0.0), std::vector<cplx>(s.h1_count, 0.0)});
  return HamiltonianVector(roots, genus, std::move(blocks));
}

HamiltonianVector HamiltonianVector::from_flat(RootSystem roots, int genus, const Eigen::VectorXcd& flat) {
  const auto shapes = block_shapes(roots, genus);
  const int n = expansion_term_count(roots, genus);
  if (flat.size() != n)
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(n) + " flat coefficients, got " + std::to_string(flat.size()));
  std::vector<HamiltonianBlock> blocks;
  for (const BlockShape& s : shapes) {
    HamiltonianBlock b{s.invariant, {}, {}};
    for (int k = 0; k < s.h0_count; ++k) b.h0.push_back(flat(s.offset + k));
    for (int k = 0; k < s.h1_count; ++k) b.h1.push_back(flat(s.offset + s.h0_count + k));
    blocks.push_back(std::move(b));
  }
  return HamiltonianVector(roots, genus, std::move(blocks));
}

int HamiltonianVector::size() const {
  int n = 0;
  for (const BlockShape& s : shapes_) n += s.h0_count + s.h1_count;
  return n;
}

Eigen::VectorXcd HamiltonianVector::flat() const {
  Eigen::VectorXcd v(size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const BlockShape& s = shapes_[b];
    for (int k = 0; k < s.h0_count; ++k) v(s.offset + k) = blocks_[b].h0[k];
    for (int k = 0; k < s.h1_count; ++k) v(s.offset + s.h0_count + k) = blocks_[b].h1[k];
  }
  return v;
}

int HamiltonianVector::pfaffian_block() const {
  for (size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b].invariant.pfaffian) return static_cast<int>(b);
  return -1;
}

HamiltonianVector HamiltonianVector::with_pfaffian_negated() const {
  HamiltonianVector out = *this;
  const int b = pfaffian_block();
  if (b >= 0) {
    for (cplx& c : out.blocks_[b].h0) c = -c;
    for (cplx& c : out.blocks_[b].h1) c = -c;
  }
  return out;
}

HamiltonianVector canonicalize(const HamiltonianVector& h) {
  const int b = h.pfaffian_block();
  if (b < 0) return h;
  const HamiltonianBlock& blk = h.blocks()[b];
  std::vector<cplx> coeffs(blk.h0);
  coeffs.insert(coeffs.end(), blk.h1.begin(), blk.h1.end());
  double maxabs = 0.0;
  for (const cplx c : coeffs) maxabs = std::max(maxabs, std::abs(c));
  if (maxabs == 0.0) return h;
  constexpr double tie = 1e-12;
  for (const cplx c : coeffs) {
    if (std::abs(c) <= tie * maxabs) continue;
    const bool negate = std::abs(c.real()) > tie * std::abs(c) ? c.real() < 0.0 : c.imag() < 0.0;
    return negate ? h.with_pfaffian_negated() : h;
  }
  return h;
}

// SpectralCurveModel --------------------------------------------------------

namespace {

double min_gap(const std::vector<cplx>& roots) {
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) gap = std::min(gap, std::abs(roots[i] - roots[j]));
  return gap;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

SpectralCurveModel::SpectralCurveModel(RootSystem roots, HyperellipticCurve base, HamiltonianVector h)
    : roots_(roots), base_(std::move(base)), nrep_(standard_rep_dimension(roots)) {
  if (!(h.roots() == roots) || h.genus() != base_.genus())
    throw Error(ErrorCode::ShapeMismatch, "Hamiltonian vector was built for a different root system or genus");
  h_ = canonicalize(h);
  for (const HamiltonianBlock& b : h_.blocks()) {
    h0_.emplace_back(b.h0);
    h1_.emplace_back(b.h1);
  }
  // Degenerate when sample fibers all carry a repeated root.
  const cplx c = base_.branch_center();
  const double r = 0.5 * base_.branch_radius() + 0.3;
  int collisions = 0;
  for (const double th : {0.3, 2.1, 4.4}) {
    const CurvePoint pt = lift_x(base_, c + std::polar(r, th))[0];
    const auto fib = lambda_fiber(pt);
    if (min_gap(fib) <= 1e-6 * (1.0 + max_abs(fib))) ++collisions;
  }
  degenerate_ = collisions == 3;
}

ComplexPoly SpectralCurveModel::block_h0(int b) const { return h0_[b]; }
ComplexPoly SpectralCurveModel::block_h1(int b) const { return h1_[b]; }

std::vector<cplx> SpectralCurveModel::invariant_values(const CurvePoint& pt) const {
  std::vector<cplx> r(h0_.size());
  for (size_t b = 0; b < h0_.size(); ++b) r[b] = h0_[b](pt.x) + pt.y * h1_[b](pt.x);
  return r;
}

ComplexPoly SpectralCurveModel::lambda_polynomial(const CurvePoint& pt) const {
  std::vector<cplx> c(static_cast<size_t>(nrep_) + 1, 0.0);
  c[nrep_] = 1.0;
  const auto r = invariant_values(pt);
  const auto& shapes = h_.shapes();
  for (size_t b = 0; b < shapes.size(); ++b) {
    if (shapes[b].invariant.pfaffian)
      c[0] += r[b] * r[b];
    else
      c[shapes[b].lambda_power] += r[b];
  }
  return ComplexPoly(std::move(c));
}

cplx SpectralCurveModel::eval(cplx lambda, const CurvePoint& pt) const { return lambda_polynomial(pt)(lambda); }

double SpectralCurveModel::scale_at(cplx lambda, const CurvePoint& pt) const {
  const ComplexPoly rp = lambda_polynomial(pt);
  double s = 1.0, lp = 1.0;
  const double al = std::abs(lambda);
  for (int m = 0; m <= rp.degree(); ++m, lp *= al) s += std::abs(rp[m]) * lp;
  return s;
}

SpectralPartials SpectralCurveModel::partials(cplx lambda, const CurvePoint& pt) const {
  SpectralPartials out;
  out.d_lambda = lambda_polynomial(pt).derivative()(lambda);
  out.d_h = Eigen::VectorXcd::Zero(h_.size());
  out.d_x = 0.0;
  out.d_y = 0.0;
  const auto r = invariant_values(pt);
  const auto& shapes = h_.shapes();
  for (size_t b = 0; b < shapes.size(); ++b) {
    const BlockShape& s = shapes[b];
    const cplx factor = s.invariant.pfaffian ? 2.0 * r[b] : std::pow(lambda, s.lambda_power);
    cplx xk = 1.0;
    for (int k = 0; k < s.h0_count; ++k, xk *= pt.x) out.d_h(s.offset + k) = factor * xk;
    xk = 1.0;
    for (int k = 0; k < s.h1_count; ++k, xk *= pt.x) out.d_h(s.offset + s.h0_count + k) = factor * pt.y * xk;
    const cplx drdx = h0_[b].derivative()(pt.x) + pt.y * h1_[b].derivative()(pt.x);
    out.d_x += factor * drdx;
    out.d_y += factor * h1_[b](pt.x);
  }
  return out;
}

cplx SpectralCurveModel::total_dx(cplx lambda, const CurvePoint& pt) const {
  const SpectralPartials p = partials(lambda, pt);
  return p.d_x + p.d_y * base_.dp()(pt.x) / (2.0 * pt.y);
}

std::vector<cplx> SpectralCurveModel::lambda_fiber_companion(const CurvePoint& pt) const {
  return companion_roots(lambda_polynomial(pt));
}

std::vector<cplx> SpectralCurveModel::lambda_fiber(const CurvePoint& pt) const {
  if (roots_.family == Family::D && roots_.rank == 2) {
    // μ = λ^2:  μ^2 + A μ + B^2 = 0
    const auto r = invariant_values(pt);
    const cplx pf = r[0], a = r[1];
    const auto mu = quadratic_roots(pf * pf, a, 1.0);
    const cplx l1 = std::sqrt(mu[0]), l2 = std::sqrt(mu[1]);
    std::vector<cplx> roots{l1, -l1, l2, -l2};
    sort_roots(roots);
    return roots;
  }
  return lambda_fiber_companion(pt);
}

SpectralPartials so4_partials(const Eigen::VectorXcd& h, cplx lambda, cplx x) {
  if (h.size() != 6) throw Error(ErrorCode::ShapeMismatch, "so(4) partials need H1..H6");
  const cplx pf = h(0) + x * h(1) + x * x * h(2);
  const cplx quad = h(3) + x * h(4) + x * x * h(5);
  SpectralPartials out;
  out.d_h = Eigen::VectorXcd(6);
  out.d_h << 2.0 * pf, 2.0 * x * pf, 2.0 * x * x * pf, lambda * lambda, lambda * lambda * x, lambda * lambda * x * x;
  out.d_lambda = 4.0 * lambda * lambda * lambda + 2.0 * lambda * quad;
  out.d_x = 2.0 * pf * (h(1) + 2.0 * x * h(2)) + lambda * lambda * (h(4) + 2.0 * x * h(5));
  out.d_y = 0.0;
  return out;
}

std::string render_spectral_polynomial(RootSystem roots, int genus) {
  const auto shapes = block_shapes(roots, genus);
  auto lam = [](int p) -> std::string {
    if (p == 0) return "";
    if (p == 1) return " λ";
    return " λ^" + std::to_string(p);
  };
  auto xpow = [](int k) -> std::string {
    if (k == 0) return "";
    if (k == 1) return "x ";
    return "x^" + std::to_string(k) + " ";
  };
  auto block = [&](const BlockShape& s) {
    std::string out = "(";
    for (int k = 0; k < s.h0_count; ++k) {
      if (k > 0) out += " + ";
      out += xpow(k) + "H" + std::to_string(s.offset + k + 1);
    }
    for (int k = 0; k < s.h1_count; ++k)
      out += " + y " + xpow(k) + "H" + std::to_string(s.offset + s.h0_count + k + 1);
    return out + ")";
  };
  std::string out = "λ^" + std::to_string(standard_rep_dimension(roots));
  std::vector<BlockShape> ordered;
  for (const BlockShape& s : shapes)
    if (!s.invariant.pfaffian) ordered.push_back(s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const BlockShape& a, const BlockShape& b) { return a.lambda_power > b.lambda_power; });
  for (const BlockShape& s : ordered) out += " + " + block(s) + lam(s.lambda_power);
  for (const BlockShape& s : shapes)
    if (s.invariant.pfaffian) out += " + " + block(s) + "^2";
  return out;
}

// LambdaSheet ---------------------------------------------------------------

namespace {

// Index of the fiber root nearest `target` and its distance to the others.
std::pair<size_t, double> nearest_with_gap(const std::vector<cplx>& fib, cplx target) {
  size_t i1 = 0;
  for (size_t i = 1; i < fib.size(); ++i)
    if (std::abs(fib[i] - target) < std::abs(fib[i1] - target)) i1 = i;
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < fib.size(); ++i)
    if (i != i1) gap = std::min(gap, std::abs(fib[i] - fib[i1]));
  return {i1, gap};
}

}  // namespace

LambdaSheet::LambdaSheet(const SpectralCurveModel& model, SpectralPoint start, double min_step)
    : model_(&model), y_(model.base(), start.at, min_step), lambda_(start.lambda), min_step_(min_step) {
  const auto [i1, gap] = nearest_with_gap(model.lambda_fiber(start.at), start.lambda);
  (void)i1;
  if (gap <= 1e-8 * (1.0 + std::abs(start.lambda)))
    throw Error(ErrorCode::SheetCollision, "starting λ is a repeated fiber root");
  gap_ = gap;
}

void LambdaSheet::advance_to(cplx x1) {
  double shrink = 1.0;
  while (x() != x1) {
    const CurvePoint here = point();
    const cplx slope = -model_->total_dx(lambda_, here) / model_->partials(lambda_, here).d_lambda;
    const cplx remaining = x1 - here.x;
    // The predicted move in λ stays below a quarter of the distance to the
    // nearest other sheet, so the corrector cannot be captured by it.
    const double cap = 0.25 * gap_ / std::max(std::abs(slope), 1e-300);
    const double len = std::min(std::abs(remaining), cap) * shrink;
    const cplx target = len >= std::abs(remaining) ? x1 : here.x + remaining * (len / std::abs(remaining));
    if (target != x1 && len < min_step_)
      throw Error(ErrorCode::ContinuationStalled, "λ continuation step underflow");

    YSheet trial = y_;
    trial.advance_to(target);
    const CurvePoint there{trial.x(), trial.y()};
    const cplx pred = lambda_ + slope * (target - here.x);

    const ComplexPoly rp = model_->lambda_polynomial(there);
    const ComplexPoly drp = rp.derivative();
    cplx ln = pred;
    bool converged = false;
    for (int it = 0; it < 8; ++it) {
      const cplx d = drp(ln);
      if (d == cplx(0.0)) break;
      const cplx delta = rp(ln) / d;
      ln -= delta;
      if (std::abs(delta) <= 1e-14 * (1.0 + std::abs(ln))) {
        converged = true;
        break;
      }
    }

    bool ok = false;
    double gap = 0.0;
    if (converged) {
      const auto fib = model_->lambda_fiber(there);
      size_t i1;
      std::tie(i1, gap) = nearest_with_gap(fib, pred);
      const double tol = 1e-8 * (1.0 + std::abs(fib[i1]));
      ok = std::abs(ln - fib[i1]) <= tol && std::abs(fib[i1] - pred) <= 0.25 * gap;
      if (ok && gap <= tol) throw Error(ErrorCode::SheetCollision, "tracked λ-root collides with another sheet");
    }
    if (ok) {
      y_ = trial;
      lambda_ = ln;
      gap_ = gap;
      shrink = std::min(1.0, 2.0 * shrink);
    } else {
      shrink *= 0.5;
      if (len * 0.5 < min_step_) throw Error(ErrorCode::ContinuationStalled, "λ continuation step underflow");
    }
  }
}

cplx continue_lambda(const SpectralCurveModel& model, const XPath& path, cplx y_start, cplx lambda_start) {
  const CurvePoint start{path.start(), y_start};
  if (!model.base().contains(start))
    throw Error(ErrorCode::InvalidArgument, "y_start does not lie over the path start");
  if (std::abs(model.eval(lambda_start, start)) > 1e-8 * model.scale_at(lambda_start, start))
    throw Error(ErrorCode::InvalidArgument, "λ_start is not on the spectral curve");
  LambdaSheet sheet(model, {lambda_start, start}, 1e-12 * std::max(path.length(), 1e-300));
  for (const cplx w : path.waypoints) sheet.advance_to(w);
  return sheet.lambda();
}

// Discriminant locus --------------------------------------------------------

namespace {

void append_roots(const ComplexPoly& p, std::vector<cplx>& out, bool& degenerate) {
  if (p.is_zero()) {
    degenerate = true;
    return;
  }
  for (const cplx r : companion_roots(p)) out.push_back(r);
}

std::vector<cplx> dedupe(std::vector<cplx> pts, double tol) {
  sort_roots(pts);
  std::vector<cplx> out;
  for (const cplx p : pts) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](cplx q) { return std::abs(p - q) <= tol * (1.0 + std::abs(p)); });
    if (!dup) out.push_back(p);
  }
  return out;
}

// Resultant of R and dR/dλ via the Sylvester matrix.
cplx lambda_discriminant(const ComplexPoly& r) {
  const int n = r.degree();
  if (n < 1) return 0.0;
  const ComplexPoly dr = r.derivative();
  const int m = dr.degree();
  if (m < 0) return 0.0;
  const int size = n + m;
  Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(size, size);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) syl(i, i + k) = r[n - k];
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) syl(m + i, i + k) = dr[m - k];
  return syl.partialPivLu().determinant();
}

bool has_y_terms(const SpectralCurveModel& model) {
  for (const HamiltonianBlock& b : model.h().blocks())
    for (const cplx c : b.h1)
      if (c != cplx(0.0)) return true;
  return false;
}

cplx sheet_norm(const SpectralCurveModel& model, cplx x, bool with_y) {
  const cplx y = std::sqrt(model.base().eval(x));
  const cplx d1 = lambda_discriminant(model.lambda_polynomial({x, y}));
  return with_y ? d1 * lambda_discriminant(model.lambda_polynomial({x, -y})) : d1;
}

// Newton on (R, dR/dλ) = 0 in (λ, x) with y following the curve. Returns the
// λ-gap of the fiber at the polished x.
double polish_collision(const SpectralCurveModel& model, cplx& x, cplx y_sign_hint) {
  const auto& base = model.base();
  auto lift = [&](cplx xv, cplx yref) {
    const cplx s = std::sqrt(base.eval(xv));
    return std::abs(s - yref) <= std::abs(-s - yref) ? s : -s;
  };
  cplx y = lift(x, y_sign_hint);
  auto fiber = model.lambda_fiber({x, y});
  size_t a = 0, b = 1;
  for (size_t i = 0; i < fiber.size(); ++i)
    for (size_t j = i + 1; j < fiber.size(); ++j)
      if (std::abs(fiber[i] - fiber[j]) < std::abs(fiber[a] - fiber[b])) a = i, b = j;
  cplx lam = 0.5 * (fiber[a] + fiber[b]);
  for (int it = 0; it < 60; ++it) {
    const CurvePoint pt{x, y};
    const ComplexPoly rp = model.lambda_polynomial(pt);
    const ComplexPoly d1 = rp.derivative(), d2 = d1.derivative();
    const cplx f1 = rp(lam), f2 = d1(lam);
    const double h = 1e-7 * (1.0 + std::abs(x));
    const cplx yp = lift(x + h, y), ym = lift(x - h, y);
    const ComplexPoly rp_p = model.lambda_polynomial({x + h, yp}), rp_m = model.lambda_polynomial({x - h, ym});
    const cplx j12 = (rp_p(lam) - rp_m(lam)) / (2.0 * h);
    const cplx j22 = (rp_p.derivative()(lam) - rp_m.derivative()(lam)) / (2.0 * h);
    const cplx j11 = f2, j21 = d2(lam);
    const cplx det = j11 * j22 - j12 * j21;
    if (det == cplx(0.0)) break;
    const cplx dl = (f1 * j22 - j12 * f2) / det;
    const cplx dx = (j11 * f2 - j21 * f1) / det;
    lam -= dl;
    x -= dx;
    y = lift(x, y);
    if (std::abs(dx) <= 1e-15 * (1.0 + std::abs(x)) && std::abs(dl) <= 1e-15 * (1.0 + std::abs(lam))) break;
  }
  fiber = model.lambda_fiber({x, y});
  return min_gap(fiber) / (1.0 + max_abs(fiber));
}

}  // namespace

DiscriminantLocus x_discriminant_points_generic(const SpectralCurveModel& model) {
  DiscriminantLocus out;
  const int n = model.fiber_degree();
  const int g = model.base().genus();
  const bool with_y = has_y_terms(model);
  const int bound = (with_y ? 2 : 1) * (g - 1) * n * (n - 1);
  const int samples = bound + 1;

  double rho = 1.0;
  for (const cplx e : model.base().branch_points()) rho = std::max(rho, 1.0 + std::abs(e));

  std::vector<cplx> values(samples);
  for (int j = 0; j < samples; ++j)
    values[j] = sheet_norm(model, std::polar(rho, 2.0 * std::numbers::pi * (j + 0.5) / samples), with_y);

  std::vector<cplx> coeffs(samples);
  double cmax = 0.0;
  for (int k = 0; k < samples; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < samples; ++j)
      acc += values[j] * std::polar(1.0, -2.0 * std::numbers::pi * k * (j + 0.5) / samples);
    coeffs[k] = acc / static_cast<double>(samples) / std::pow(rho, k);
    cmax = std::max(cmax, std::abs(coeffs[k]) * std::pow(rho, k));
  }
  if (cmax == 0.0) {
    out.degenerate = true;
  } else {
    while (!coeffs.empty() && std::abs(coeffs.back()) * std::pow(rho, coeffs.size() - 1) <= 1e-11 * cmax)
      coeffs.pop_back();
    std::vector<cplx> cand;
    if (coeffs.size() > 1) cand = companion_roots(ComplexPoly(coeffs));
    for (cplx x : cand) {
      bool near_branch = false;
      for (const cplx e : model.base().branch_points()) near_branch |= std::abs(x - e) < 1e-9;
      if (near_branch) continue;
      double best = std::numeric_limits<double>::infinity();
      cplx best_x = x;
      const cplx y0 = std::sqrt(model.base().eval(x));
      for (const cplx ys : {y0, -y0}) {
        cplx xp = x;
        const double gap = polish_collision(model, xp, ys);
        if (gap < best) best = gap, best_x = xp;
      }
      if (best <= 1e-6) out.discriminant.push_back(best_x);
    }
  }
  out.discriminant = dedupe(out.discriminant, 1e-8);
  out.points = out.discriminant;
  out.points.insert(out.points.end(), model.base().branch_points().begin(), model.base().branch_points().end());
  out.points = dedupe(out.points, 1e-10);
  return out;
}

DiscriminantLocus x_discriminant_points(const SpectralCurveModel& model) {
  if (!(model.roots().family == Family::D && model.roots().rank == 2)) return x_discriminant_points_generic(model);
  DiscriminantLocus out;
  const ComplexPoly pf = model.block_h0(0);
  const ComplexPoly quad = model.block_h0(1);
  append_roots(quad - 2.0 * pf, out.discriminant, out.degenerate);
  append_roots(quad + 2.0 * pf, out.discriminant, out.degenerate);
  append_roots(pf, out.discriminant, out.degenerate);
  out.discriminant = dedupe(out.discriminant, 1e-12);
  out.points = out.discriminant;
  out.points.insert(out.points.end(), model.base().branch_points().begin(), model.base().branch_points().end());
  out.points = dedupe(out.points, 1e-12);
  return out;
}

}  // namespace hitchin
