#include "hitchin/canonicity.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "hitchin/errors.hpp"
#include "hitchin/parallel.hpp"

namespace hitchin {

CanonicalChart canonical_chart(const HyperellipticCurve& curve, const SpectralDivisor& divisor, cplx basepoint,
                               const std::vector<cplx>& obstacles, double tol) {
  CanonicalChart chart;
  chart.basepoint = basepoint;
  const cplx y0 = lift_x(curve, basepoint)[0].y;
  for (const SpectralPoint& p : divisor.points) {
    if (p.at.x == basepoint) {
      chart.pairs.push_back({p.lambda, 0.0});
      chart.paths.push_back(XPath{{basepoint, basepoint}, curve.default_clearance()});
      chart.y_base.push_back(p.at.y);
      continue;
    }
    XPath path = plan_path(curve, basepoint, p.at.x, obstacles);
    const cplx y_end = continue_y(curve, path, y0);
    const cplx yb = std::abs(y_end - p.at.y) <= std::abs(y_end + p.at.y) ? y0 : -y0;
    chart.pairs.push_back({p.lambda, abelian_integral(curve, path, yb, 0, tol)});
    chart.paths.push_back(std::move(path));
    chart.y_base.push_back(yb);
  }
  return chart;
}

namespace {

struct TailIntegral {
  cplx value;
  cplx y_end;
};

// ∫ dx / y over the straight segment anchor.x -> x as a single Gauss-Kronrod
// panel; the segments here are far shorter than the distance to any branch
// point.
TailIntegral tail_integral(const HyperellipticCurve& curve, const CurvePoint& anchor, cplx x) {
  if (x == anchor.x) return {0.0, anchor.y};
  const double len = std::abs(x - anchor.x);
  YSheet sheet(curve, anchor, 1e-12 * len);
  auto f = [](const YSheet& s) {
    Eigen::VectorXcd v(1);
    v(0) = 1.0 / s.y();
    return v;
  };
  const PanelLayout one_panel{{}, 0};
  const auto res = integrate_along({anchor.x, x}, sheet, f, 1, QuadratureOptions{}, &one_panel);
  return {res.value(0), res.end.y()};
}

}  // namespace

CurvePoint invert_x_tilde(const HyperellipticCurve& curve, const CurvePoint& anchor, cplx delta, double tol) {
  if (delta == cplx(0.0)) return anchor;
  cplx x = anchor.x + delta * anchor.y;
  double last = std::numeric_limits<double>::infinity();
  int polish = 0;
  for (int it = 0; it < 50; ++it) {
    const TailIntegral ti = tail_integral(curve, anchor, x);
    const cplx r = ti.value - delta;
    const double ar = std::abs(r);
    if (ar <= tol) {
      // keep stepping while the residual still drops: FD probes need the
      // inverse to rounding accuracy, not just to tol
      if (!(ar < 0.5 * last) || ++polish > 3 || ar == 0.0) return {x, ti.y_end};
    }
    last = ar;
    x -= r * ti.y_end;
  }
  throw Error(ErrorCode::NewtonDiverged, "x̃ inversion did not converge");
}

// CanonicalMap ----------------------------------------------------------------

namespace {

HamiltonianVector resolve_h(RootSystem roots, const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                            const std::optional<HamiltonianVector>& h, const SolverOptions& opts) {
  if (h) return canonicalize(*h);
  if (roots == RootSystem{Family::D, 2} && curve.genus() == 2) return solve_so4_radicals(curve, divisor, opts).best().h;
  throw Error(ErrorCode::InvalidArgument, "a Hamiltonian vector is required outside D2 / genus 2");
}

}  // namespace

CanonicalMap::CanonicalMap(RootSystem roots, HyperellipticCurve curve, SpectralDivisor divisor, cplx basepoint,
                           std::optional<HamiltonianVector> h, CanonicityOptions opts)
    : roots_(roots),
      curve_(std::move(curve)),
      divisor_(std::move(divisor)),
      basepoint_(basepoint),
      opts_(std::move(opts)),
      model_(roots_, curve_, resolve_h(roots_, curve_, divisor_, h, opts_.solver)) {
  const ResidualReport rep = residuals(model_, divisor_);
  if (rep.scaled_max > opts_.solver.tol_residual)
    throw Error(ErrorCode::NoSolution, "H does not put the divisor on its spectral curve (scaled residual " +
                                           std::to_string(rep.scaled_max) + ")");
  const auto obstacles = angle_obstacles(model_);
  for (const SpectralPoint& p : divisor_.points)
    plans_.push_back(plan_point(model_, p, basepoint_, obstacles, opts_.angle));
  base_ = angle_coordinates_on_paths(model_, plans_, basepoint_, opts_.angle);
  for (size_t i = 0; i < plans_.size(); ++i) plans_[i].layout = base_.paths[i].layout;

  auto key = [](const SpectralPoint& p) {
    return std::array<double, 4>{p.at.x.real(), p.at.x.imag(), p.lambda.real(), p.lambda.imag()};
  };
  order_.resize(divisor_.size());
  std::iota(order_.begin(), order_.end(), size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](size_t a, size_t b) { return key(divisor_.points[a]) < key(divisor_.points[b]); });
}

SpectralDivisor CanonicalMap::perturbed_divisor(const Eigen::VectorXcd& dz) const {
  const int n = size();
  if (dz.size() != 2 * n) throw Error(ErrorCode::ShapeMismatch, "perturbation must have 2N entries");
  SpectralDivisor out = divisor_;
  for (int i = 0; i < n; ++i) {
    SpectralPoint& p = out.points[static_cast<size_t>(i)];
    p.lambda += dz(i);
    p.at = invert_x_tilde(curve_, p.at, dz(n + i), opts_.inversion_tol);
  }
  return out;
}

namespace {

PathPlan with_tail(const PathPlan& base, cplx x_new) {
  PathPlan p = base;
  if (x_new != base.path.end()) p.path = base.path.then(XPath{{base.path.end(), x_new}, base.path.clearance});
  return p;
}

cplx nearest(const std::vector<cplx>& roots, cplx target) {
  return *std::min_element(roots.begin(), roots.end(),
                           [&](cplx a, cplx b) { return std::abs(a - target) < std::abs(b - target); });
}

}  // namespace

Eigen::VectorXcd CanonicalMap::evaluate(const Eigen::VectorXcd& dz) const {
  const int n = size();
  const SpectralDivisor div = perturbed_divisor(dz);
  // Newton and the φ sum both run in the fixed internal order, so relabeling
  // the divisor gives bit-identical output
  SpectralDivisor sorted;
  for (size_t k : order_) sorted.points.push_back(div.points[k]);
  const HamiltonianVector h = solve_newton(roots_, curve_, sorted, model_.h(), opts_.solver).best().h;
  const SpectralCurveModel model(roots_, curve_, h);

  std::vector<PathPlan> plans;
  for (size_t k : order_) {
    PathPlan p = with_tail(plans_[k], div.points[k].at.x);
    p.lambda_base = nearest(model.lambda_fiber({basepoint_, p.y_base}), p.lambda_base);
    plans.push_back(std::move(p));
  }
  AngleOptions ao = opts_.angle;
  ao.threads = 1;
  const AngleVector phi = angle_coordinates_on_paths(model, plans, basepoint_, ao);

  Eigen::VectorXcd out(2 * n);
  out << h.flat(), phi.phi;
  return out;
}

Eigen::VectorXcd CanonicalMap::angles_moving_point(int i, cplx delta) const {
  const size_t k = static_cast<size_t>(i);
  const CurvePoint moved = invert_x_tilde(curve_, divisor_.points[k].at, delta, opts_.inversion_tol);
  AngleOptions ao = opts_.angle;
  ao.threads = 1;
  const AngleVector single =
      angle_coordinates_on_paths(model_, {with_tail(plans_[k], moved.x)}, basepoint_, ao);
  return base_.phi - base_.paths[k].contribution + single.phi;
}

// Jacobians and defects -------------------------------------------------------

Eigen::MatrixXd real_jacobian(const CanonicalMap& map, double h) {
  const int n = map.size();
  const int dim = 4 * n;
  Eigen::MatrixXd m(dim, dim);
  parallel_for(
      dim,
      [&](int c) {
        Eigen::VectorXcd dz = Eigen::VectorXcd::Zero(2 * n);
        dz(c % (2 * n)) = c < 2 * n ? cplx(h, 0.0) : cplx(0.0, h);
        const Eigen::VectorXcd w = (map.evaluate(dz) - map.evaluate(-dz)) / (2.0 * h);
        m.col(c) << w.real(), w.imag();
      },
      map.options().threads);
  return m;
}

Eigen::MatrixXd real_symplectic_form(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd jr = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  jr.topLeftCorner(2 * n, 2 * n) = j;
  jr.bottomRightCorner(2 * n, 2 * n) = -j;
  return jr;
}

double symplectic_defect_of(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd jr = real_symplectic_form(static_cast<int>(m.rows()) / 4);
  return (m.transpose() * jr * m - jr).cwiseAbs().rowwise().sum().maxCoeff();
}

SymplecticReport symplectic_defect(const CanonicalMap& map, double fd_step) {
  if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
  SymplecticReport rep;
  rep.fd_step = fd_step;
  rep.jacobian = real_jacobian(map, fd_step);
  rep.defect = symplectic_defect_of(rep.jacobian);
  rep.defect_half = symplectic_defect_of(real_jacobian(map, 0.5 * fd_step));
  const double lo = std::min(rep.defect, rep.defect_half), hi = std::max(rep.defect, rep.defect_half);
  if (hi > 10.0 * lo)
    throw Error(ErrorCode::FDUnstable, "halving fd_step changed the defect from " + std::to_string(rep.defect) +
                                           " to " + std::to_string(rep.defect_half));
  rep.halving_steps = map.options().halving_steps;
  for (const double h : rep.halving_steps) rep.halving_defects.push_back(symplectic_defect_of(real_jacobian(map, h)));
  for (size_t k = 1; k < rep.halving_defects.size(); ++k)
    rep.halving_ratios.push_back(rep.halving_defects[k - 1] / rep.halving_defects[k]);
  return rep;
}

SymplecticReport symplectic_defect(RootSystem roots, const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                                   cplx basepoint, double fd_step, const CanonicityOptions& opts) {
  return symplectic_defect(CanonicalMap(roots, curve, divisor, basepoint, std::nullopt, opts), fd_step);
}

Eigen::MatrixXd conjugacy_residual(const CanonicalMap& map, double h) {
  const int n = map.size();
  const SpectralCurveModel& model = map.model();
  Eigen::MatrixXd out(n, n);
  parallel_for(
      n,
      [&](int i) {
        const SpectralPoint& p = map.divisor().points[static_cast<size_t>(i)];
        const Eigen::VectorXcd fd = (map.angles_moving_point(i, h) - map.angles_moving_point(i, -h)) / (2.0 * h);
        // R'_{H_j} / R'_λ = y · integrand_j
        const Eigen::VectorXcd ratio = p.at.y * integrand_all(model, p.lambda, p.at);
        out.row(i) = (fd + ratio).cwiseAbs().transpose();
      },
      map.options().threads);
  return out;
}

Eigen::MatrixXd conjugacy_residual(const SpectralCurveModel& model, const SpectralDivisor& divisor, cplx basepoint,
                                   const CanonicityOptions& opts) {
  const CanonicalMap map(model.roots(), model.base(), divisor, basepoint, model.h(), opts);
  return conjugacy_residual(map, opts.fd_step);
}

Eigen::MatrixXcd implicit_h_jacobian(const SpectralCurveModel& model, const SpectralDivisor& divisor) {
  const int n = static_cast<int>(divisor.size());
  Eigen::MatrixXcd jh(n, model.h().size());
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const SpectralPoint& p = divisor.points[static_cast<size_t>(i)];
    const SpectralPartials d = model.partials(p.lambda, p.at);
    jh.row(i) = d.d_h.transpose();
    rhs(i, i) = -d.d_lambda;
    rhs(i, n + i) = -model.total_dx(p.lambda, p.at) * p.at.y;  // dx/dx̃ = y
  }
  return jh.partialPivLu().solve(rhs);
}

Eigen::MatrixXcd complex_h_block(const Eigen::MatrixXd& m, int n) {
  Eigen::MatrixXcd out(n, 2 * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < 2 * n; ++c) out(r, c) = cplx(m(r, c), m(2 * n + r, c));
  return out;
}

}  // namespace hitchin
