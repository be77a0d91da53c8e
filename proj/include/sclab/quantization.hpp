#pragma once

#include "sclab/symbol.hpp"
#include "sclab/wavefield.hpp"

namespace sclab::quantization {

enum class OpTag { weyl, left, function_of, product, parametrix, other };

/// Dense matrix realization of an operator on a periodic 1-D grid with N
/// internal components (block layout: component-major, grid index fastest).
struct GridOperator {
  GridSpec grid;
  double h = 1.0;
  int ncomp = 1;
  MatrixXcd matrix;
  OpTag tag = OpTag::other;

  Index dim() const { return matrix.rows(); }
  /// max |M - M^dagger| entry.
  double hermiticity_defect() const;
  VectorXcd apply(const VectorXcd& f) const { return matrix * f; }
  WaveField apply(const WaveField& f) const;
};

struct QuantizeOptions {
  /// Optional cosine taper over the top octave of the xi band, for symbols
  /// with significant band-edge content. Off by default: every built-in
  /// symbol family is analytic in xi, so the aliasing the taper guards
  /// against is already below round-off, while tapering would break the
  /// exactness of multiplier and polynomial quantizations.
  bool taper_top_octave = false;
  /// Emit band-limit diagnostics when the symbol does not decay inside the
  /// band (fraction of sup-norm present in the top octave).
  double band_warn_fraction = 0.5;
};

struct QuantizeDiagnostics {
  double band_edge_fraction = 0.0;
  bool band_limit_warning = false;
};

/// Midpoint (Weyl) quantization on the periodic grid: kernel built by FFT
/// of the symbol over the xi grid at every doubled-grid midpoint, with the
/// periodic wrap of x - y resolved along the short arc.
GridOperator weyl_quantize(const Symbol& a, const GridSpec& grid, double h,
                           const QuantizeOptions& opts = {},
                           QuantizeDiagnostics* diag = nullptr);

/// Left (classical) quantization: the symbol is evaluated at x instead of
/// the midpoint.
GridOperator left_quantize(const Symbol& a, const GridSpec& grid, double h,
                           const QuantizeOptions& opts = {},
                           QuantizeDiagnostics* diag = nullptr);

/// Weyl quantization from tabulated symbol values: blocks[alpha*N+beta] is a
/// (2n x n) table over (doubled-grid midpoint, natural-order xi slot).
GridOperator weyl_quantize_tables(const std::vector<MatrixXcd>& blocks, int ncomp,
                                  const GridSpec& grid, double h);

/// Operator norm by power iteration on M^dagger M (deterministic start).
double operator_norm(const MatrixXcd& m, double rel_tol = 1e-9, int max_iters = 300);

/// max ||R phi|| / ||phi|| over a fixed family of coherent-state probes in
/// the interior of the box and band. Identities that are exact for the
/// continuum operator are tested this way: the periodic wrap of unbounded
/// coordinate symbols only pollutes vectors near the box edge or band edge.
double probe_residual(const MatrixXcd& R, const GridSpec& grid, double h, int nprobes = 8,
                      double q_spread = 0.25, double p_spread = 0.8);

/// || Op(a)Op(b) - Op(ab) - (h/2i) Op({a,b}) ||.
double calculus_residual_product(const Symbol& a, const Symbol& b, const GridSpec& grid,
                                 double h);

/// || [Op(a),Op(b)] - (h/i) Op({a,b}) ||.
double calculus_residual_commutator(const Symbol& a, const Symbol& b, const GridSpec& grid,
                                    double h);

/// Smallest eigenvalue of Op_h(a) for a real (Hermitian-valued) symbol.
double garding_min_eig(const Symbol& a, const GridSpec& grid, double h);

/// || Op(p^{-1}) p(x,hD) - Id || for an elliptic p; the operator is built by
/// left quantization and the parametrix by Weyl quantization.
/// Throws when |p| < c <xi>^m somewhere on the grid band.
double parametrix_residual(const Symbol& p, const GridSpec& grid, double h,
                           double ellipticity_floor = 0.05);

/// F(A) by dense Hermitian eigendecomposition.
GridOperator function_of_operator(const GridOperator& A, const SmoothFunction& F,
                                  double hermitian_tol = 1e-8);

struct HelfferSjostrandOptions {
  int order = 3;        // n: almost-analytic extension order (>= 2)
  int nx = 129;         // real-axis quadrature points
  int ny = 33;          // imaginary-axis points per half plane
  double y_max = 1.0;   // extension height
};

struct HelfferSjostrandReport {
  double quadrature_weight_mass = 0.0;  // sum |dbar F| weights (diagnostic)
  int resolvent_solves = 0;
};

/// F(A) through the almost-analytic resolvent integral (midpoint quadrature
/// in the upper/lower half planes, dense LU resolvent solves). Independent
/// of the eigendecomposition route.
GridOperator helffer_sjostrand(const GridOperator& A, const SmoothFunction& F,
                               const HelfferSjostrandOptions& opts = {},
                               HelfferSjostrandReport* report = nullptr);

struct TracePair {
  double lhs = 0.0;  // Tr F(Op_h(a))
  double rhs = 0.0;  // (2 pi h)^{-d} int F(a) dx dxi
};

TracePair trace_formula_check(const Symbol& a, const SmoothFunction& F, const GridSpec& grid,
                              double h);

/// Frobenius norm of Op_h(a) against (2 pi h)^{-d/2} ||a||_{L^2}.
struct HilbertSchmidtPair {
  double op_hs = 0.0;
  double symbol_l2 = 0.0;
};
HilbertSchmidtPair hilbert_schmidt_check(const Symbol& a, const GridSpec& grid, double h);

/// max_k ||(Op_h(a) - B* a B) probe_k|| over a fixed probe family
/// (coherent states inside the symbol support + seeded band-limited fields).
double bargmann_link_residual(const Symbol& a, const GridSpec& grid, double h,
                              int n_probes = 12, std::uint64_t seed = 777);

}  // namespace sclab::quantization
