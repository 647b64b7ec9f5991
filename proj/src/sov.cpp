#include "hitchin/sov.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hitchin/errors.hpp"

namespace hitchin {

double divisor_scale(const SpectralCurveModel& model, const SpectralDivisor& divisor) {
  double s = 1.0;
  for (const SpectralPoint& p : divisor.points) s = std::max(s, model.scale_at(p.lambda, p.at));
  return s;
}

ResidualReport residuals(const SpectralCurveModel& model, const SpectralDivisor& divisor) {
  ResidualReport rep;
  for (const SpectralPoint& p : divisor.points) {
    const double r = std::abs(model.eval(p.lambda, p.at));
    rep.values.push_back(r);
    rep.max = std::max(rep.max, r);
  }
  rep.scale = divisor_scale(model, divisor);
  rep.scaled_max = rep.max / rep.scale;
  return rep;
}

ResidualReport residuals(RootSystem roots, const HyperellipticCurve& curve, const HamiltonianVector& h,
                         const SpectralDivisor& divisor) {
  return residuals(SpectralCurveModel(roots, curve, h), divisor);
}

// so(4) elimination -----------------------------------------------------------

namespace {

constexpr RootSystem kD2{Family::D, 2};

using Vec6 = Eigen::Matrix<cplx, 6, 1>;

// q(x) = (H1 + x H2 + x^2 H3)^2 in the basis H1², H2², H3², H1H2, H1H3, H2H3.
Vec6 pfaffian_square_basis(cplx x) {
  Vec6 c;
  c << 1.0, x * x, x * x * x * x, 2.0 * x, 2.0 * x * x, 2.0 * x * x * x;
  return c;
}

Eigen::Vector3cd vandermonde_row(cplx x) { return Eigen::Vector3cd(1.0, x, x * x); }

int cross_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i == 0 ? (j == 1 ? 0 : 1) : 2;
}

// One row of an EliminationState as a quadratic form in (H1, H2, H3).
struct Form {
  std::array<cplx, 3> sq;
  std::array<cplx, 3> cross;  // H1H2, H1H3, H2H3

  cplx operator()(const Eigen::Vector3cd& h) const {
    return sq[0] * h(0) * h(0) + sq[1] * h(1) * h(1) + sq[2] * h(2) * h(2) + cross[0] * h(0) * h(1) +
           cross[1] * h(0) * h(2) + cross[2] * h(1) * h(2);
  }
  double magnitude() const {
    double m = 0.0;
    for (int k = 0; k < 3; ++k) m = std::max({m, std::abs(sq[k]), std::abs(cross[k])});
    return m;
  }
};

Form row_form(const EliminationState& s, int r) {
  return Form{{s.a(r, 0), s.a(r, 1), s.a(r, 2)}, {s.b(r, 0), s.b(r, 1), s.b(r, 2)}};
}

// A form restricted to H_role = 1 and read as a conic in t_v:
// alpha t_v^2 + beta(t_w) t_v + gamma(t_w).
struct Conic {
  cplx alpha;
  ComplexPoly beta;
  ComplexPoly gamma;
};

Conic as_conic(const Form& f, int r, int v, int w) {
  return Conic{f.sq[v], ComplexPoly{f.cross[cross_index(r, v)], f.cross[cross_index(v, w)]},
               ComplexPoly{f.sq[r], f.cross[cross_index(r, w)], f.sq[w]}};
}

// Eliminates t_v^2 between two homogeneous conics: alpha2 C1 - alpha1 C2 is
// linear in t_v. `other` is the conic the linear relation gets substituted into.
struct Linearized {
  ComplexPoly beta;
  ComplexPoly gamma;
  Conic other;
};

Linearized linearize(const Conic& c1, const Conic& c2, double ref) {
  if (std::max(std::abs(c1.alpha), std::abs(c2.alpha)) <= 1e-12 * ref) return {c1.beta, c1.gamma, c2};
  return {c2.alpha * c1.beta - c1.alpha * c2.beta, c2.alpha * c1.gamma - c1.alpha * c2.gamma,
          std::abs(c1.alpha) >= std::abs(c2.alpha) ? c1 : c2};
}

std::array<int, 2> others(int r) {
  if (r == 0) return {1, 2};
  if (r == 1) return {0, 2};
  return {0, 1};
}

bool negligible(const ComplexPoly& p, double ref) { return p.is_zero() || p.max_abs_coeff() <= 1e-12 * ref; }

// Row operations on [a | b | rhs] as one 3x7 block.
using Block = Eigen::Matrix<cplx, 3, 7>;

Block to_block(const EliminationState& s) {
  Block m;
  m << s.a, s.b, s.rhs;
  return m;
}

EliminationState from_block(const Block& m, EliminationStage stage) {
  EliminationState s;
  s.a = m.leftCols<3>();
  s.b = m.middleCols<3>(3);
  s.rhs = m.col(6);
  s.stage = stage;
  return s;
}

}  // namespace

So4Elimination::So4Elimination(const SpectralDivisor& divisor) : divisor_(divisor) {
  const auto& pts = divisor_.points;
  if (pts.size() != 6)
    throw Error(ErrorCode::InvalidArgument, "the so(4) pipeline needs 6 divisor points, got " +
                                                std::to_string(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i].at.x - pts[j].at.x) <= 1e-8)
        throw Error(ErrorCode::DegenerateDivisor,
                    "points " + std::to_string(i) + " and " + std::to_string(j) + " share x");

  std::array<int, 6> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return std::abs(pts[i].lambda) > std::abs(pts[j].lambda); });
  std::copy(order.begin(), order.begin() + 3, linear_.begin());
  std::copy(order.begin() + 3, order.end(), quad_.begin());
  if (std::abs(pts[order[0]].lambda) == 0.0) throw Error(ErrorCode::DegenerateDivisor, "all λ_i vanish");
  if (std::abs(pts[linear_[2]].lambda) <= 1e-12 * std::abs(pts[linear_[0]].lambda))
    throw Error(ErrorCode::DegenerateDivisor, "fewer than three nonzero λ_i for the linear elimination");

  for (int a = 0; a < 3; ++a) vandermonde_.row(a) = vandermonde_row(pts[linear_[a]].at.x).transpose();
  const Eigen::PartialPivLU<Eigen::Matrix3cd> vlu(vandermonde_);

  // Lagrange weights w_i = row(x_i) V^{-1}, so that
  // H4 + x_i H5 + x_i^2 H6 = Σ_a w_ia (-λ_a^2 - q_a / λ_a^2).
  EliminationState s;
  double rhs_ref = 0.0;
  for (int r = 0; r < 3; ++r) {
    const SpectralPoint& pi = pts[quad_[r]];
    const Eigen::Vector3cd w = vlu.transpose().solve(vandermonde_row(pi.at.x));
    const cplx li2 = pi.lambda * pi.lambda;
    Vec6 q = pfaffian_square_basis(pi.at.x);
    cplx rhs = -li2 * li2;
    double ref = std::abs(li2 * li2);
    for (int a = 0; a < 3; ++a) {
      const SpectralPoint& pa = pts[linear_[a]];
      const cplx la2 = pa.lambda * pa.lambda;
      q -= li2 * w(a) / la2 * pfaffian_square_basis(pa.at.x);
      rhs += li2 * w(a) * la2;
      ref += std::abs(li2 * w(a) * la2);
    }
    s.a.row(r) = q.head<3>().transpose();
    s.b.row(r) = q.tail<3>().transpose();
    s.rhs(r) = rhs;
    rhs_ref = std::max(rhs_ref, ref);
  }
  s.stage = EliminationStage::Quadratic;
  quadratic_ = s;

  zero_rhs_ = quadratic_.rhs.cwiseAbs().maxCoeff() <= 1e-10 * rhs_ref;

  // Gauss-Jordan on the squares block with partial pivoting. A singular
  // block leaves the later stages undefined; raw_candidates() then only has
  // the trivial Pfaffian block (if the right side vanishes) or nothing.
  Block m = to_block(s);
  const double anorm = s.a.cwiseAbs().maxCoeff();
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
    if (!(std::abs(m(p, c)) > 1e-12 * anorm)) {
      rank_deficient_ = true;
      diagonal_ = homogeneous_ = quadratic_;
      return;
    }
    m.row(c).swap(m.row(p));
    m.row(c) /= m(c, c);
    for (int r = 0; r < 3; ++r)
      if (r != c) m.row(r) -= m(r, c) * m.row(c);
  }
  diagonal_ = from_block(m, EliminationStage::Diagonalized);

  // Right side removed by direct scaled subtraction of the pivot row. The
  // rescale-then-subtract route divides by right sides that may vanish.
  diagonal_.rhs.cwiseAbs().maxCoeff(&pivot_);
  // a^{-1} is invertible, so the right side vanishes iff it did before.
  Block h = m;
  if (!zero_rhs_)
    for (int r = 0; r < 3; ++r)
      if (r != pivot_) {
        h.row(r) -= (m(r, 6) / m(pivot_, 6)) * m.row(pivot_);
        h(r, 6) = 0.0;
      }
  homogeneous_ = from_block(h, EliminationStage::Homogenized);
}

Eigen::Vector3cd So4Elimination::h456(const Eigen::Vector3cd& h123) const {
  Eigen::Vector3cd rhs;
  for (int a = 0; a < 3; ++a) {
    const SpectralPoint& p = divisor_.points[linear_[a]];
    const cplx pf = h123(0) + p.at.x * h123(1) + p.at.x * p.at.x * h123(2);
    const cplx l2 = p.lambda * p.lambda;
    rhs(a) = -l2 - pf * pf / l2;
  }
  return vandermonde_.partialPivLu().solve(rhs);
}

EliminationState So4Elimination::equalized() const {
  if (rank_deficient_) throw Error(ErrorCode::DegenerateDivisor, "quadratic-term matrix is rank deficient");
  Block m = to_block(diagonal_);
  const double ref = diagonal_.rhs.cwiseAbs().maxCoeff();
  for (int r = 0; r < 3; ++r) {
    if (std::abs(m(r, 6)) <= 1e-12 * ref || ref == 0.0)
      throw Error(ErrorCode::DegenerateDivisor, "a right side vanishes; rows cannot be equalized");
    m.row(r) /= m(r, 6);
  }
  return from_block(m, EliminationStage::Equalized);
}

ComplexPoly So4Elimination::quartic(int role) const {
  if (zero_rhs_ || rank_deficient_) return {};
  const auto [v, w] = others(role);
  std::array<Form, 2> rows;
  int k = 0;
  for (int r = 0; r < 3; ++r)
    if (r != pivot_) rows[k++] = row_form(homogeneous_, r);
  const double ref = std::max(rows[0].magnitude(), rows[1].magnitude());
  const Conic c1 = as_conic(rows[0], role, v, w), c2 = as_conic(rows[1], role, v, w);

  const Linearized lin = linearize(c1, c2, ref);
  // t_v = -gamma_l / beta_l into the other conic, times beta_l^2.
  return lin.other.alpha * lin.gamma * lin.gamma - lin.other.beta * lin.gamma * lin.beta +
         lin.other.gamma * lin.beta * lin.beta;
}

std::vector<Eigen::VectorXcd> So4Elimination::raw_candidates() const {
  std::vector<Eigen::VectorXcd> out;
  auto push = [&](const Eigen::Vector3cd& h123) {
    Eigen::VectorXcd h(6);
    h << h123, h456(h123);
    out.push_back(h);
  };
  if (zero_rhs_) {
    push(Eigen::Vector3cd::Zero());
    return out;
  }
  if (rank_deficient_) return out;
  const Form fp = row_form(homogeneous_, pivot_);
  const cplx rhs_p = homogeneous_.rhs(pivot_);
  std::array<Form, 2> rows;
  int k = 0;
  for (int r = 0; r < 3; ++r)
    if (r != pivot_) rows[k++] = row_form(homogeneous_, r);
  const double ref = std::max(rows[0].magnitude(), rows[1].magnitude());

  // Scale from the inhomogeneous row: u^2 f_p(t) = rhs_p.
  auto emit = [&](int role, int v, int w, cplx tv, cplx tw) {
    Eigen::Vector3cd t;
    t(role) = 1.0;
    t(v) = tv;
    t(w) = tw;
    const cplx f = fp(t);
    if (std::abs(f) <= 1e-12 * fp.magnitude() * std::max(1.0, t.squaredNorm())) return;
    const cplx u = std::sqrt(rhs_p / f);
    push(u * t);
    push(-u * t);
  };

  for (int role = 0; role < 3; ++role) {
    const auto [v, w] = others(role);
    const Conic c1 = as_conic(rows[0], role, v, w), c2 = as_conic(rows[1], role, v, w);
    const Linearized lin = linearize(c1, c2, ref);
    const ComplexPoly& beta_l = lin.beta;
    const ComplexPoly& gamma_l = lin.gamma;
    const Conic* other = &lin.other;
    const double lref = std::max(ref * ref, 1e-300);

    if (negligible(beta_l, lref)) {
      // No linear term: gamma_l(t_w) = 0 fixes t_w, then the other conic is
      // a quadratic in t_v.
      if (negligible(gamma_l, lref)) continue;
      for (const cplx tw : low_degree_roots(gamma_l)) {
        const ComplexPoly in_tv{other->gamma(tw), other->beta(tw), other->alpha};
        if (negligible(in_tv, ref)) continue;
        for (const cplx tv : low_degree_roots(in_tv)) emit(role, v, w, tv, tw);
      }
      continue;
    }

    const ComplexPoly q = quartic(role);
    if (negligible(q, lref * ref)) continue;
    for (cplx tw : low_degree_roots(q)) {
      // One Newton polish on the quartic itself.
      const ComplexPoly dq = q.derivative();
      for (int it = 0; it < 2; ++it) {
        const cplx d = dq(tw);
        if (std::abs(d) == 0.0) break;
        const cplx step = q(tw) / d;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        if (std::abs(step) > 1e-6 * (1.0 + std::abs(tw))) break;
        tw -= step;
      }
      const cplx dn = beta_l(tw);
      if (std::abs(dn) <= 1e-12 * beta_l.max_abs_coeff() * std::max(1.0, std::abs(tw))) continue;
      emit(role, v, w, -gamma_l(tw) / dn, tw);
    }
  }
  return out;
}

namespace {

// F_i(H) and dF_i/dH for the raw (not canonicalized) H. The model stores the
// canonical representative, under which the Pfaffian columns flip sign.
struct SystemEval {
  Eigen::VectorXcd f;
  Eigen::MatrixXcd jac;
  double scale = 1.0;
};

SystemEval evaluate_system(RootSystem roots, const HyperellipticCurve& curve, const HamiltonianVector& h,
                           const SpectralDivisor& divisor, bool with_jacobian) {
  const SpectralCurveModel model(roots, curve, h);
  const int n = static_cast<int>(divisor.size());
  SystemEval ev;
  ev.f.resize(n);
  if (with_jacobian) ev.jac.resize(n, h.size());
  const int pb = h.pfaffian_block();
  double sign = 1.0;
  if (pb >= 0 && model.h().flat() != h.flat()) sign = -1.0;
  for (int i = 0; i < n; ++i) {
    const SpectralPoint& p = divisor.points[i];
    ev.f(i) = model.eval(p.lambda, p.at);
    if (with_jacobian) {
      Eigen::VectorXcd dh = model.partials(p.lambda, p.at).d_h;
      if (sign < 0) {
        const BlockShape& s = h.shapes()[pb];
        dh.segment(s.offset, s.h0_count + s.h1_count) *= -1.0;
      }
      ev.jac.row(i) = dh.transpose();
    }
  }
  ev.scale = divisor_scale(model, divisor);
  return ev;
}

}  // namespace

SolutionSet solve_newton(RootSystem roots, const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                         const HamiltonianVector& h0, const SolverOptions& opts) {
  const int n = hamiltonian_count(roots, curve.genus());
  if (static_cast<int>(divisor.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "divisor has " + std::to_string(divisor.size()) + " points, expected " +
                                              std::to_string(n));
  if (!(h0.roots() == roots) || h0.genus() != curve.genus())
    throw Error(ErrorCode::ShapeMismatch, "Newton seed does not match the root system and genus");

  Eigen::VectorXcd h = h0.flat();
  auto make = [&](const Eigen::VectorXcd& v) { return HamiltonianVector::from_flat(roots, curve.genus(), v); };
  SystemEval ev = evaluate_system(roots, curve, make(h), divisor, true);
  double fnorm = ev.f.cwiseAbs().maxCoeff();

  auto newton_step = [&](const SystemEval& e) -> Eigen::VectorXcd {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(e.jac);
    if (!(lu.rcond() >= opts.min_rcond))
      throw Error(ErrorCode::NewtonDiverged, "Jacobian is ill-conditioned (rcond " + std::to_string(lu.rcond()) + ")");
    return lu.solve(-e.f);
  };

  int it = 0;
  while (fnorm > opts.newton_tol * ev.scale) {
    if (++it > opts.max_iterations)
      throw Error(ErrorCode::NewtonDiverged, "no convergence after " + std::to_string(opts.max_iterations) + " iterations");
    const Eigen::VectorXcd step = newton_step(ev);
    double t = 1.0;
    for (;;) {
      const Eigen::VectorXcd trial = h + t * step;
      SystemEval tev = evaluate_system(roots, curve, make(trial), divisor, true);
      const double tn = tev.f.cwiseAbs().maxCoeff();
      if (std::isfinite(tn) && (tn < (1.0 - 1e-4 * t) * fnorm || t < 1.0 / 1024)) {
        h = trial;
        ev = std::move(tev);
        fnorm = tn;
        break;
      }
      t *= 0.5;
    }
  }
  // Polish: a few full steps while the residual keeps dropping.
  for (int k = 0; k < 3 && fnorm > 0.0; ++k) {
    const Eigen::VectorXcd trial = h + newton_step(ev);
    SystemEval tev = evaluate_system(roots, curve, make(trial), divisor, true);
    const double tn = tev.f.cwiseAbs().maxCoeff();
    if (!(tn < fnorm)) break;
    h = trial;
    ev = std::move(tev);
    fnorm = tn;
  }

  SolutionSet out;
  out.method = "newton";
  out.candidates.push_back({canonicalize(make(h)), fnorm / ev.scale});
  return out;
}

SolutionSet solve_so4_radicals(const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                               const SolverOptions& opts) {
  if (curve.genus() != 2) throw Error(ErrorCode::InvalidArgument, "the so(4) radical pipeline needs genus 2");
  const So4Elimination elim(divisor);

  SolutionSet out;
  out.method = "radicals";
  for (const Eigen::VectorXcd& v : elim.raw_candidates()) {
    if (!v.allFinite()) continue;
    const HamiltonianVector h = canonicalize(HamiltonianVector::from_flat(kD2, 2, v));
    const ResidualReport rep = residuals(kD2, curve, h, divisor);
    if (!(rep.scaled_max <= opts.tol_residual)) continue;
    const Eigen::VectorXcd flat = h.flat();
    auto dup = std::find_if(out.candidates.begin(), out.candidates.end(), [&](const Candidate& c) {
      return (c.h.flat() - flat).cwiseAbs().maxCoeff() < 1e-7;
    });
    if (dup == out.candidates.end())
      out.candidates.push_back({h, rep.scaled_max});
    else if (rep.scaled_max < dup->residual)
      *dup = {h, rep.scaled_max};
  }

  if (out.candidates.empty()) {
    // Every branch divided by zero or failed the filter: Newton from zero.
    try {
      SolutionSet nw = solve_newton(kD2, curve, divisor, HamiltonianVector::zeros(kD2, 2), opts);
      if (nw.best().residual <= opts.tol_residual) {
        nw.method = "radicals+newton";
        return nw;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NewtonDiverged) throw;
    }
    throw Error(ErrorCode::NoSolution, "no candidate meets the residual tolerance");
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
  return out;
}

// Sampling ----------------------------------------------------------------

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

cplx uniform_square(std::mt19937_64& rng) {
  const double re = 2.0 * uniform01(rng) - 1.0;
  const double im = 2.0 * uniform01(rng) - 1.0;
  return {re, im};
}

cplx uniform_disk(std::mt19937_64& rng, cplx center, double radius) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double th = 2.0 * std::numbers::pi * uniform01(rng);
  return center + std::polar(r, th);
}

}  // namespace

HamiltonianVector random_hamiltonian(RootSystem roots, int genus, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = expansion_term_count(roots, genus);
  Eigen::VectorXcd v(n);
  for (int k = 0; k < n; ++k) v(k) = uniform_square(rng);
  return HamiltonianVector::from_flat(roots, genus, v);
}

HyperellipticCurve random_curve(int genus, std::uint64_t seed) {
  if (genus < 2) throw Error(ErrorCode::InvalidArgument, "genus must be >= 2");
  std::mt19937_64 rng(seed);
  std::vector<cplx> roots;
  while (static_cast<int>(roots.size()) < 2 * genus + 1) {
    const cplx z = uniform_disk(rng, 0.0, 1.0);
    if (std::all_of(roots.begin(), roots.end(), [&](cplx r) { return std::abs(r - z) >= 0.2; })) roots.push_back(z);
  }
  return HyperellipticCurve(ComplexPoly::from_roots(roots));
}

double divisor_condition(const SpectralCurveModel& model, const SpectralDivisor& divisor) {
  const int n = static_cast<int>(divisor.size());
  Eigen::MatrixXcd jac(n, model.h().size());
  for (int i = 0; i < n; ++i) {
    const SpectralPoint& p = divisor.points[static_cast<size_t>(i)];
    jac.row(i) = model.partials(p.lambda, p.at).d_h.transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
}

SpectralDivisor sample_divisor(const SpectralCurveModel& model, std::uint64_t seed, const SampleOptions& opts) {
  if (model.degenerate()) throw Error(ErrorCode::DegenerateModel, "cannot sample a divisor on a degenerate model");
  const HyperellipticCurve& curve = model.base();
  const int n = hamiltonian_count(model.roots(), curve.genus());
  const DiscriminantLocus locus = x_discriminant_points(model);
  const double clearance = curve.default_clearance();
  const cplx center = curve.branch_center();
  const double radius = 1.2 * curve.branch_radius();
  const cplx base = curve.default_basepoint();
  const double min_sep = 0.02 * std::max(radius, 1e-3);

  std::mt19937_64 rng(seed);
  SpectralDivisor div;
  int attempts = 0, redraws = 0;
  for (;;) {
    if (static_cast<int>(div.size()) == n) {
      if (divisor_condition(model, div) <= opts.max_condition) break;
      if (++redraws > opts.max_redraws)
        throw Error(ErrorCode::DegenerateModel, "no divisor within the condition bound");
      div.points.clear();
    }
    if (++attempts > 200000) throw Error(ErrorCode::DegenerateModel, "could not place divisor points");
    const cplx x = uniform_disk(rng, center, radius);
    const bool ysign = uniform01(rng) < 0.5;
    const double pick = uniform01(rng);

    if (std::any_of(locus.points.begin(), locus.points.end(),
                    [&](cplx o) { return std::abs(x - o) < 5.0 * clearance; }))
      continue;
    if (std::any_of(div.points.begin(), div.points.end(),
                    [&](const SpectralPoint& p) { return std::abs(p.at.x - x) < min_sep; }))
      continue;
    try {
      plan_path(curve, base, x, locus.points, clearance);
    } catch (const Error&) {
      continue;
    }
    const auto lifts = lift_x(curve, x);
    const CurvePoint pt = lifts[ysign ? 1 : 0];
    const auto fiber = model.lambda_fiber(pt);
    double big = 0.0, gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < fiber.size(); ++i) {
      big = std::max(big, std::abs(fiber[i]));
      for (size_t j = i + 1; j < fiber.size(); ++j) gap = std::min(gap, std::abs(fiber[i] - fiber[j]));
    }
    if (gap < 1e-3 * (1.0 + big)) continue;
    const size_t k = std::min(fiber.size() - 1, static_cast<size_t>(pick * static_cast<double>(fiber.size())));
    const SpectralPoint sp{fiber[k], pt};
    if (std::abs(model.eval(sp.lambda, pt)) > 1e-10 * model.scale_at(sp.lambda, pt))
      throw Error(ErrorCode::NoSolution, "sampled fiber root fails the residual check");
    div.points.push_back(sp);
  }
  return div;
}

SampledInstance sample_instance(RootSystem roots, int genus, std::uint64_t seed, const SampleOptions& opts) {
  // Fixed offsets keep curve, H and divisor streams independent.
  HyperellipticCurve curve = random_curve(genus, seed * 3 + 1);
  for (std::uint64_t k = 0;; ++k) {
    const HamiltonianVector h = canonicalize(random_hamiltonian(roots, genus, seed * 3 + 2 + 1000003 * k));
    const SpectralCurveModel model(roots, curve, h);
    if (model.degenerate()) continue;
    SpectralDivisor div = sample_divisor(model, seed * 3 + 3, opts);
    return SampledInstance{std::move(curve), h, std::move(div)};
  }
}

}  // namespace hitchin
