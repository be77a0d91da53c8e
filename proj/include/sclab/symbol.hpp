#pragma once

#include "sclab/grid.hpp"

#include <vector>

namespace sclab {

/// Phase-space observable a(x, xi) on R^2 (1-D position), scalar or N x N
/// matrix valued, with evaluable partial derivatives. The derivative
/// callback receives the orders (ax, axi); (0,0) is the value itself.
struct Symbol {
  int ncomp = 1;       // matrix dimension N (1 = scalar)
  int class_order = 0; // S^m metadata
  int max_derivative = 2;
  bool is_real = true; // real scalar / Hermitian matrix values

  std::function<Complex(int ax, int axi, double x, double xi)> scalar;
  std::function<MatrixXcd(int ax, int axi, double x, double xi)> matrix;

  Complex value(double x, double xi) const { return scalar(0, 0, x, xi); }
  Complex deriv(int ax, int axi, double x, double xi) const;
  MatrixXcd value_m(double x, double xi) const;
  MatrixXcd deriv_m(int ax, int axi, double x, double xi) const;

  /// N_k(a): sup over the grid band of all derivatives of order <= k.
  double seminorm(int k, const GridSpec& xgrid, double h) const;

  /// Largest |a| over the top octave of the xi band relative to the overall
  /// sup; a band-limit diagnostic for symbols that do not decay.
  double band_edge_fraction(const GridSpec& xgrid, double h) const;
};

/// Finite-difference cross-check of the stored first derivatives at probe
/// points; returns the worst relative error.
double symbol_derivative_defect(const Symbol& a, const GridSpec& xgrid, double h,
                                int probes = 32, std::uint64_t seed = 12345);

// --- scalar families -------------------------------------------------------

/// x^i xi^j monomial combination.
struct MonomialTerm {
  double coeff;
  int xpow;
  int xipow;
};
Symbol sym_polynomial(const std::vector<MonomialTerm>& terms);
Symbol sym_x();
Symbol sym_xi();
Symbol sym_constant(double c);

/// amp * exp(-(x-x0)^2/(2 sx^2) - (xi-xi0)^2/(2 sxi^2))
Symbol sym_gaussian_bump(double x0, double xi0, double sx, double sxi, double amp = 1.0);

/// Product of a polynomial prefactor and a Gaussian bump (for symbols that
/// vanish at a prescribed point while staying nonnegative, etc.).
Symbol sym_poly_times_gaussian(const std::vector<MonomialTerm>& poly, double x0, double xi0,
                               double sx, double sxi);

/// 1/p with derivatives to second order; p must not vanish on the domain.
Symbol sym_reciprocal(const Symbol& p, int class_order);

Symbol sym_sum(const Symbol& a, const Symbol& b, Complex wa = 1.0, Complex wb = 1.0);
Symbol sym_product(const Symbol& a, const Symbol& b);

struct SmoothFunction;

/// Symbol F(x) (xi-independent) from a smooth function with derivatives.
Symbol sym_function_of_x(const SmoothFunction& F);

/// Windowed coordinate x * chi(x): equals x on [-r, r] and rolls smoothly
/// to zero towards the box edge. The periodic-grid stand-in for the
/// unbounded coordinate symbol.
Symbol sym_windowed_x(double r, double rolloff);

/// Poisson bracket {a,b} = da/dxi db/dx - da/dx db/dxi (value and first
/// derivatives, via second derivatives of the factors).
Symbol sym_poisson(const Symbol& a, const Symbol& b);

/// Composition F(a) for scalar real a, with derivatives to second order.
Symbol sym_compose(const SmoothFunction& F, const Symbol& a);

// --- matrix families --------------------------------------------------------

/// 2x2 Hermitian matrix symbol from entry-wise scalar symbols
/// [[a11, a12], [conj(a12), a22]].
Symbol sym_matrix2(const Symbol& a11, const Symbol& a12, const Symbol& a22);

/// [[x^2, x xi], [x xi, xi^2]] * envelope: nonnegative matrix symbol with
/// genuinely non-commuting values.
Symbol sym_rank_one_matrix_bump(double sx, double sxi, double amp = 1.0);

// --- smooth compactly supported functions of one variable ------------------

/// F together with derivatives of any order (analytic families).
struct SmoothFunction {
  std::function<double(int k, double t)> deriv;  // k-th derivative
  double support_lo = 0.0, support_hi = 0.0;

  double operator()(double t) const { return deriv(0, t); }
};

/// Gaussian bump amp * exp(-(t-c)^2/w^2) (numerically compactly supported).
SmoothFunction smooth_gaussian(double c, double w, double amp = 1.0);
/// Smoothed indicator of [a, b] with erf roll-off width w.
SmoothFunction smooth_plateau(double a, double b, double w);
/// F(t) = t (for trivial functional-calculus checks).
SmoothFunction smooth_identity(double lo, double hi);
/// F(t) = c.
SmoothFunction smooth_const(double c, double lo, double hi);

/// Physicists' Hermite polynomial H_k(u).
double hermite_phys(int k, double u);

}  // namespace sclab
