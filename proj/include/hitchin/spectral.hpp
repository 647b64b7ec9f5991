#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hitchin/hyperelliptic.hpp"
#include "hitchin/polyalg.hpp"

namespace hitchin {

enum class Family { A, B, C, D };

char family_letter(Family f);
Family parse_family(const std::string& s);

struct RootSystem {
  Family family = Family::D;
  int rank = 2;

  /// Throws UnsupportedFamily for ranks outside A_{>=1}, B_{>=1}, C_{>=1}, D_{>=2}.
  static RootSystem make(Family family, int rank);
  friend bool operator==(const RootSystem&, const RootSystem&) = default;
};

struct InvariantDegree {
  int degree = 0;
  bool pfaffian = false;
  friend bool operator==(const InvariantDegree&, const InvariantDegree&) = default;
};

/// Fundamental invariant degrees. D_n: the Pfaffian (degree n) first, then
/// 2, 4, ..., 2(n-1); A_n: 2..n+1; B_n, C_n: 2, 4, ..., 2n.
std::vector<InvariantDegree> invariant_degrees(RootSystem roots);

int lie_algebra_dimension(RootSystem roots);
/// N_rep: degree of the spectral polynomial in λ.
int standard_rep_dimension(RootSystem roots);

/// dim(g) · (g - 1). Throws InvalidArgument for g < 2.
int hamiltonian_count(RootSystem roots, int genus);
/// Σ_i [d_i(g-1) + 1] + max(0, (d_i-1)(g-1) - 1), counted term by term from
/// the expansion r_i = Σ_k H0_ik x^k + Σ_s H1_is y x^s.
int expansion_term_count(RootSystem roots, int genus);

/// Layout of one invariant's expansion coefficients inside the flat vector.
struct BlockShape {
  InvariantDegree invariant;
  int h0_count = 0;     // k = 0 .. d(g-1)
  int h1_count = 0;     // s = 0 .. (d-1)(g-1)-2, empty when negative
  int lambda_power = 0; // power of λ multiplying r_i; the Pfaffian enters squared
  int offset = 0;       // position of H0_{i,0} in the flat vector
};

std::vector<BlockShape> block_shapes(RootSystem roots, int genus);

struct HamiltonianBlock {
  InvariantDegree invariant;
  std::vector<cplx> h0;
  std::vector<cplx> h1;
};

/// Structured coefficients H0_ik, H1_is of the invariant expansion.
/// Flat order: blocks in block_shapes() order, h0 then h1 inside a block.
/// For D_2 this gives H1..H3 = Pfaffian block, H4..H6 = degree-2 block.
class HamiltonianVector {
 public:
  HamiltonianVector() = default;
  /// Blocks are matched to shapes by (degree, pfaffian); throws ShapeMismatch.
  HamiltonianVector(RootSystem roots, int genus, std::vector<HamiltonianBlock> blocks);

  static HamiltonianVector zeros(RootSystem roots, int genus);
  static HamiltonianVector from_flat(RootSystem roots, int genus, const Eigen::VectorXcd& flat);

  RootSystem roots() const { return roots_; }
  int genus() const { return genus_; }
  const std::vector<HamiltonianBlock>& blocks() const { return blocks_; }
  const std::vector<BlockShape>& shapes() const { return shapes_; }
  int size() const;
  Eigen::VectorXcd flat() const;

  /// Index of the Pfaffian block, or -1.
  int pfaffian_block() const;
  HamiltonianVector with_pfaffian_negated() const;

 private:
  RootSystem roots_;
  int genus_ = 0;
  std::vector<BlockShape> shapes_;
  std::vector<HamiltonianBlock> blocks_;
};

/// For family D, flips the Pfaffian block so its first non-negligible
/// coefficient has Re > 0 (Im >= 0 on a tie). Identity for other families.
HamiltonianVector canonicalize(const HamiltonianVector& h);

/// λ-point over a base-curve point.
struct SpectralPoint {
  cplx lambda;
  CurvePoint at;
};

struct SpectralPartials {
  cplx d_lambda;
  Eigen::VectorXcd d_h;  // flat order
  cplx d_x;              // at fixed y
  cplx d_y;              // at fixed x
};

/// R(λ, x, y; H) = λ^{N_rep} + Σ_i λ^{p_i} r_i(x, y) [+ r_0(x, y)^2 for D],
/// r_i = Σ_k H0_ik x^k + y Σ_s H1_is x^s. Immutable after construction.
class SpectralCurveModel {
 public:
  /// Stores the canonicalized H. Throws ShapeMismatch if H does not fit
  /// (roots, base genus).
  SpectralCurveModel(RootSystem roots, HyperellipticCurve base, HamiltonianVector h);

  RootSystem roots() const { return roots_; }
  const HyperellipticCurve& base() const { return base_; }
  const HamiltonianVector& h() const { return h_; }
  int fiber_degree() const { return nrep_; }
  /// True when every λ-fiber has a repeated root (e.g. zero Pfaffian block).
  bool degenerate() const { return degenerate_; }

  /// r_i(x, y) for every block.
  std::vector<cplx> invariant_values(const CurvePoint& pt) const;
  /// R(·, x, y; H) as a polynomial in λ.
  ComplexPoly lambda_polynomial(const CurvePoint& pt) const;
  cplx eval(cplx lambda, const CurvePoint& pt) const;
  SpectralPartials partials(cplx lambda, const CurvePoint& pt) const;
  /// dR/dx along the curve: ∂R/∂x + ∂R/∂y · P'(x) / (2y).
  cplx total_dx(cplx lambda, const CurvePoint& pt) const;
  /// 1 + Σ_m |c_m(x, y)| |λ|^m, the magnitude scale of evaluating R.
  double scale_at(cplx lambda, const CurvePoint& pt) const;

  /// All roots in λ (N_rep of them, with multiplicity), ordered by (re, im).
  std::vector<cplx> lambda_fiber(const CurvePoint& pt) const;
  /// Fiber through the companion matrix regardless of family.
  std::vector<cplx> lambda_fiber_companion(const CurvePoint& pt) const;

  /// Coefficient polynomials in x of block `b`: r_b = h0(x) + y h1(x).
  ComplexPoly block_h0(int b) const;
  ComplexPoly block_h1(int b) const;

 private:
  RootSystem roots_;
  HyperellipticCurve base_;
  HamiltonianVector h_;
  int nrep_ = 0;
  bool degenerate_ = false;
  std::vector<ComplexPoly> h0_, h1_;
};

/// so(4) partials written out explicitly for H = (H1..H6):
/// dR/dH_j = 2 x^{j-1} (H1 + x H2 + x^2 H3), j = 1..3;
/// dR/dH_j = λ^2 x^{j-4}, j = 4..6;  dR/dλ = 4λ^3 + 2λ(H4 + x H5 + x^2 H6).
SpectralPartials so4_partials(const Eigen::VectorXcd& h, cplx lambda, cplx x);

/// Rendered polynomial, e.g. "λ^4 + (H4 + x H5 + x^2 H6) λ^2 + (H1 + x H2 + x^2 H3)^2".
std::string render_spectral_polynomial(RootSystem roots, int genus);

/// Analytic continuation of a λ-sheet (and the y-sheet beneath it) along
/// straight moves: tangent predictor, Newton corrector (<= 8 iterations),
/// acceptance only when the result is the fiber root nearest the predictor.
class LambdaSheet {
 public:
  LambdaSheet(const SpectralCurveModel& model, SpectralPoint start, double min_step);

  void advance_to(cplx x1);
  cplx x() const { return y_.x(); }
  cplx y() const { return y_.y(); }
  cplx lambda() const { return lambda_; }
  CurvePoint point() const { return {y_.x(), y_.y()}; }
  const SpectralCurveModel& model() const { return *model_; }

 private:
  const SpectralCurveModel* model_;
  YSheet y_;
  cplx lambda_;
  double min_step_;
  double gap_ = 0.0;  // distance from λ to the nearest other fiber root
};

/// λ at the end of `path`. Throws SheetCollision, ContinuationStalled.
cplx continue_lambda(const SpectralCurveModel& model, const XPath& path, cplx y_start, cplx lambda_start);

struct DiscriminantLocus {
  /// Discriminant zeros merged with the base branch points.
  std::vector<cplx> points;
  /// Zeros of the λ-discriminant only.
  std::vector<cplx> discriminant;
  /// The discriminant vanishes identically (some factor is the zero polynomial).
  bool degenerate = false;
};

/// x-values where the λ-fiber degenerates. D_2 uses the exact factorization
/// (A - 2B)(A + 2B) B; other models interpolate the sheet-symmetrized
/// discriminant on a circle and polish each zero.
DiscriminantLocus x_discriminant_points(const SpectralCurveModel& model);
/// The interpolation route for any model (exposed for cross-checking).
DiscriminantLocus x_discriminant_points_generic(const SpectralCurveModel& model);

}  // namespace hitchin
