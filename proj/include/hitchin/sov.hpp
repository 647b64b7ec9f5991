#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hitchin/spectral.hpp"

namespace hitchin {

/// N points (λ_i, x_i, y_i) through which the spectral curve passes.
struct SpectralDivisor {
  std::vector<SpectralPoint> points;
  size_t size() const { return points.size(); }
};

struct Candidate {
  HamiltonianVector h;
  double residual = 0.0;  // max_i |R_i| / scale
};

struct SolutionSet {
  std::string method;
  std::vector<Candidate> candidates;  // ascending residual
  const Candidate& best() const { return candidates.front(); }
};

struct ResidualReport {
  std::vector<double> values;  // |R(λ_i, x_i, y_i; H)|
  double max = 0.0;
  double scale = 1.0;
  double scaled_max = 0.0;  // max / scale
};

/// 1 + max_i Σ_m |c_m(x_i, y_i)| |λ_i|^m.
double divisor_scale(const SpectralCurveModel& model, const SpectralDivisor& divisor);
ResidualReport residuals(const SpectralCurveModel& model, const SpectralDivisor& divisor);
ResidualReport residuals(RootSystem roots, const HyperellipticCurve& curve, const HamiltonianVector& h,
                         const SpectralDivisor& divisor);

struct SolverOptions {
  double tol_residual = 1e-8;  // candidate filter, relative to scale
  double newton_tol = 1e-10;   // ‖F‖∞ / scale at convergence
  int max_iterations = 200;
  double min_rcond = 1e-14;
};

enum class EliminationStage { Quadratic, Diagonalized, Equalized, Homogenized };

/// Three quadratic-form equations in (H1, H2, H3) left after the linear
/// elimination of H4..H6. Columns of `a` are H1², H2², H3²; columns of `b`
/// are H1H2, H1H3, H2H3.
struct EliminationState {
  Eigen::Matrix3cd a;
  Eigen::Matrix3cd b;
  Eigen::Vector3cd rhs;
  EliminationStage stage = EliminationStage::Quadratic;
};

/// The so(4), genus-2 elimination to a quartic, exposed stage by stage.
class So4Elimination {
 public:
  /// Throws DegenerateDivisor (repeated x, vanishing λ among the linear rows,
  /// rank deficiency) and InvalidArgument (wrong size).
  explicit So4Elimination(const SpectralDivisor& divisor);

  /// Divisor indices feeding the linear elimination (largest |λ|, ties by index).
  const std::array<int, 3>& linear_rows() const { return linear_; }
  const std::array<int, 3>& quadratic_rows() const { return quad_; }

  /// (H4, H5, H6) from the linear rows for given (H1, H2, H3).
  Eigen::Vector3cd h456(const Eigen::Vector3cd& h123) const;

  const EliminationState& quadratic() const { return quadratic_; }
  const EliminationState& diagonalized() const { return diagonal_; }
  /// Rows rescaled so every right side equals 1. Throws DegenerateDivisor if
  /// some right side vanishes.
  EliminationState equalized() const;
  /// Right side removed from all rows but the pivot (largest |rhs|).
  const EliminationState& homogenized() const { return homogeneous_; }
  int pivot() const { return pivot_; }
  /// True when every right side is negligible (the pipeline then only has
  /// the H1 = H2 = H3 = 0 solution).
  bool homogeneous_system() const { return zero_rhs_; }
  /// The squares block could not be diagonalized; stages past Quadratic are
  /// copies of it and equalized() throws.
  bool rank_deficient() const { return rank_deficient_; }

  /// Quartic in t_w = H_w / H_r for role r (v < w the two other indices),
  /// obtained from the two homogeneous rows. Zero polynomial when the role
  /// degenerates.
  ComplexPoly quartic(int role) const;

  /// Unfiltered candidate vectors (H1..H6) from all roles.
  std::vector<Eigen::VectorXcd> raw_candidates() const;

 private:
  SpectralDivisor divisor_;
  std::array<int, 3> linear_{};
  std::array<int, 3> quad_{};
  Eigen::Matrix3cd vandermonde_;
  EliminationState quadratic_, diagonal_, homogeneous_;
  int pivot_ = 0;
  bool zero_rhs_ = false;
  bool rank_deficient_ = false;
};

/// All H of the D2, genus-2 spectral curve through the 6 divisor points that
/// the elimination reaches, filtered by residual, canonicalized and merged.
/// Throws DegenerateDivisor, NoSolution.
SolutionSet solve_so4_radicals(const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                               const SolverOptions& opts = {});

/// Damped Newton on F_i(H) = R(λ_i, x_i, y_i; H). Throws NewtonDiverged.
SolutionSet solve_newton(RootSystem roots, const HyperellipticCurve& curve, const SpectralDivisor& divisor,
                         const HamiltonianVector& h0, const SolverOptions& opts = {});

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

struct SampleOptions {
  /// Redraw the whole divisor until the 2-norm condition number of dR/dH at
  /// its points is at most this (infinite: no filter).
  double max_condition = std::numeric_limits<double>::infinity();
  int max_redraws = 10000;
};

/// Condition number of the N × N matrix dR(λ_i, x_i, y_i)/dH_j.
double divisor_condition(const SpectralCurveModel& model, const SpectralDivisor& divisor);

/// N seeded points on the model's spectral curve, away from branch points and
/// the discriminant, with pairwise distinct x. Throws DegenerateModel.
SpectralDivisor sample_divisor(const SpectralCurveModel& model, std::uint64_t seed, const SampleOptions& opts = {});

/// Coefficients uniform in the square [-1, 1]^2.
HamiltonianVector random_hamiltonian(RootSystem roots, int genus, std::uint64_t seed);
/// Monic P with 2g + 1 planted roots in the unit disk, pairwise >= 0.2 apart.
HyperellipticCurve random_curve(int genus, std::uint64_t seed);

struct SampledInstance {
  HyperellipticCurve curve;
  HamiltonianVector h;  // canonical
  SpectralDivisor divisor;
};

/// The seeded test instance used by the CLI sampler and the test suites.
SampledInstance sample_instance(RootSystem roots, int genus, std::uint64_t seed, const SampleOptions& opts = {});

}  // namespace hitchin
