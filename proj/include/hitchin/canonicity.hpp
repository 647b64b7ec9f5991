#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "hitchin/angle.hpp"
#include "hitchin/sov.hpp"

namespace hitchin {

/// (λ_i, x̃_i) with x̃_i = ∫_{x0}^{x_i} dx / y along the recorded path.
struct CanonicalPoint {
  cplx lambda;
  cplx x_tilde;
};

struct CanonicalChart {
  std::vector<CanonicalPoint> pairs;
  cplx basepoint;
  std::vector<XPath> paths;
  std::vector<cplx> y_base;  // lift at the basepoint each path starts from
};

/// x̃_i for every divisor point; paths avoid branch points and `obstacles`.
CanonicalChart canonical_chart(const HyperellipticCurve& curve, const SpectralDivisor& divisor, cplx basepoint,
                               const std::vector<cplx>& obstacles = {}, double tol = 1e-10);

/// The point reached from `anchor` by moving x̃ by `delta` along the straight
/// segment leaving anchor.x: Newton on ∫_{anchor} dx / y = delta with
/// derivative 1/y, accepted at residual <= tol and then polished to rounding.
/// Throws NewtonDiverged.
CurvePoint invert_x_tilde(const HyperellipticCurve& curve, const CurvePoint& anchor, cplx delta, double tol = 1e-11);

struct CanonicityOptions {
  AngleOptions angle;
  SolverOptions solver;
  double fd_step = 1e-5;
  std::vector<double> halving_steps{1e-4, 5e-5, 2.5e-5};
  double inversion_tol = 1e-11;
  int threads = 0;
};

/// The map (λ_1..λ_N, x̃_1..x̃_N) -> (H_1..H_N, φ_1..φ_N) near a divisor.
/// Perturbed points are reached along the base path plus a straight tail;
/// quadrature reuses the base panel layouts, and H is the Newton solution
/// seeded at the unperturbed H.
class CanonicalMap {
 public:
  /// `h` defaults to the best radical candidate (D2) and is required otherwise.
  CanonicalMap(RootSystem roots, HyperellipticCurve curve, SpectralDivisor divisor, cplx basepoint,
               std::optional<HamiltonianVector> h, CanonicityOptions opts = {});

  int size() const { return static_cast<int>(divisor_.size()); }
  const SpectralCurveModel& model() const { return model_; }
  const SpectralDivisor& divisor() const { return divisor_; }
  const AngleVector& base_angles() const { return base_; }
  const CanonicityOptions& options() const { return opts_; }

  /// Divisor at base + dz, dz = (dλ, dx̃) in C^{2N}.
  SpectralDivisor perturbed_divisor(const Eigen::VectorXcd& dz) const;
  /// (H, φ) at base + dz.
  Eigen::VectorXcd evaluate(const Eigen::VectorXcd& dz) const;
  /// φ at fixed H when only point i moves by δ in x̃ (λ follows its sheet).
  Eigen::VectorXcd angles_moving_point(int i, cplx delta) const;

 private:
  RootSystem roots_;
  HyperellipticCurve curve_;
  SpectralDivisor divisor_;
  cplx basepoint_;
  CanonicityOptions opts_;
  SpectralCurveModel model_;
  std::vector<PathPlan> plans_;  // with frozen layouts
  AngleVector base_;
  std::vector<size_t> order_;    // points sorted by (x, λ); makes evaluate() label-blind
};

/// Real-form central-difference Jacobian, 4N × 4N. Columns (Re λ, Re x̃,
/// Im λ, Im x̃), rows (Re H, Re φ, Im H, Im φ).
Eigen::MatrixXd real_jacobian(const CanonicalMap& map, double h);

/// diag(J, -J) with J = [[0, I], [-I, 0]], the real part of Σ dλ ∧ dx̃.
Eigen::MatrixXd real_symplectic_form(int n);
/// ‖Mᵀ J_R M - J_R‖∞ (max row sum).
double symplectic_defect_of(const Eigen::MatrixXd& m);

struct SymplecticReport {
  double defect = 0.0;       // at fd_step
  double fd_step = 0.0;
  double defect_half = 0.0;  // at fd_step / 2
  std::vector<double> halving_steps;
  std::vector<double> halving_defects;
  std::vector<double> halving_ratios;  // defect(h) / defect(h / 2)
  Eigen::MatrixXd jacobian;            // at fd_step
};

/// Throws FDUnstable if halving fd_step changes the defect by more than 10x.
SymplecticReport symplectic_defect(const CanonicalMap& map, double fd_step);
SymplecticReport symplectic_defect(RootSystem roots, const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                                   cplx basepoint, double fd_step, const CanonicityOptions& opts = {});

/// N × N: entry (i, j) = |FD ∂φ_j/∂x̃_i + R'_{H_j}/R'_λ at point i|, at fixed H.
Eigen::MatrixXd conjugacy_residual(const CanonicalMap& map, double h);
Eigen::MatrixXd conjugacy_residual(const SpectralCurveModel& model, const SpectralDivisor& divisor, cplx basepoint,
                                   const CanonicityOptions& opts = {});

/// dH/d(λ, x̃) (N × 2N, complex) from implicit differentiation of
/// R(λ_i, x_i, y_i; H) = 0 at the divisor.
Eigen::MatrixXcd implicit_h_jacobian(const SpectralCurveModel& model, const SpectralDivisor& divisor);
/// The complex H-rows of a real-form Jacobian, N × 2N.
Eigen::MatrixXcd complex_h_block(const Eigen::MatrixXd& m, int n);

}  // namespace hitchin
