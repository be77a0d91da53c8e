#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sclab/quantization.hpp"
#include "sclab/transforms.hpp"
#include "sclab/wavepackets.hpp"

#include <Eigen/Eigenvalues>

using namespace sclab;
using namespace sclab::quantization;

namespace {
const GridSpec kGrid = GridSpec::line(-1.25, 1.25, 256);
const double kH = 1.0 / 64;
}  // namespace

TEST_CASE("weyl: multiplication symbols quantize to diagonal matrices") {
  const GridOperator A = weyl_quantize(sym_x(), kGrid, kH);
  double offdiag = 0.0, diag = 0.0;
  for (Index i = 0; i < A.dim(); ++i) {
    diag = std::max(diag, std::abs(A.matrix(i, i) - kGrid.point(0, i)));
    for (Index j = 0; j < A.dim(); ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(A.matrix(i, j)));
  }
  CHECK(diag < 1e-12);
  CHECK(offdiag < 1e-12);

  // x-only symbols: left quantization coincides with Weyl
  const Symbol ax = sym_polynomial({{1.0, 2, 0}, {0.5, 1, 0}});
  const GridOperator W = weyl_quantize(ax, kGrid, kH);
  const GridOperator L = left_quantize(ax, kGrid, kH);
  CHECK((W.matrix - L.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("weyl: xi quantizes to the spectral derivative") {
  const GridOperator A = weyl_quantize(sym_xi(), kGrid, kH);
  const GridOperator L = left_quantize(sym_xi(), kGrid, kH);
  CHECK((A.matrix - L.matrix).cwiseAbs().maxCoeff() < 1e-12);

  // oracle: conjugation of multiplication-by-xi by the h-Fourier transform
  const Index n = kGrid.count(0);
  WaveField probe(kGrid, kH);
  const double pref = std::pow(kPi * kH, -0.25);
  for (Index i = 0; i < n; ++i) {
    const double u = kGrid.point(0, i) - 0.1;
    probe.samples[i] =
        pref * std::exp(-u * u / (2 * kH)) * std::exp(Complex(0.0, 0.3 * u / kH));
  }
  WaveField mf = transforms::h_fourier(probe);
  for (Index i = 0; i < n; ++i) mf.samples[i] *= mf.grid.point(0, i);
  const WaveField hd = transforms::h_fourier_inverse(mf, kGrid);
  const VectorXcd direct = A.matrix * probe.samples;
  double err = 0.0;
  for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(direct[i] - hd.samples[i]));
  CHECK(err < 1e-8);
}

TEST_CASE("weyl: real symbols give Hermitian operators") {
  const Symbol bump = sym_gaussian_bump(0.1, -0.2, 0.2, 0.3);
  const GridOperator A = weyl_quantize(bump, kGrid, kH);
  CHECK(A.hermiticity_defect() < 1e-10);

  const Symbol mixed = sym_polynomial({{1.0, 1, 1}});
  CHECK(weyl_quantize(mixed, kGrid, kH).hermiticity_defect() < 1e-10);

  // complex symbol: anti-Hermitian part quantizes the imaginary part
  const Symbol im = sym_gaussian_bump(-0.1, 0.1, 0.25, 0.35);
  const Symbol ci = sym_sum(bump, im, 1.0, Complex(0.0, 1.0));
  const GridOperator C = weyl_quantize(ci, kGrid, kH);
  const GridOperator Im = weyl_quantize(im, kGrid, kH);
  const MatrixXcd anti = 0.5 * (C.matrix - C.matrix.adjoint());
  CHECK((anti - kI * Im.matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weyl tables agree with the symbol path") {
  const Symbol bump = sym_gaussian_bump(0.0, 0.15, 0.22, 0.28);
  const Index n = kGrid.count(0);
  const GridSpec pg = kGrid.momentum_grid(kH);
  MatrixXcd tab(2 * n, n);
  for (Index tau = 0; tau < 2 * n; ++tau)
    for (Index m = 0; m < n; ++m)
      tab(tau, m) = bump.value(kGrid.lo()[0] + 0.5 * kGrid.spacing(0) * double(tau),
                               pg.point(0, m));
  const GridOperator A = weyl_quantize(bump, kGrid, kH);
  const GridOperator B = weyl_quantize_tables({tab}, 1, kGrid, kH);
  CHECK((A.matrix - B.matrix).cwiseAbs().maxCoeff() < 1e-13);
}

// The unbounded coordinate symbol is represented on the torus by the
// windowed x * chi(x); exact identities are probed with coherent states in
// the flat part of the window.
namespace {
const GridSpec kWinGrid = GridSpec::line(-1.5, 1.5, 512);
const double kWinH = 1.0 / 256;
const double kWinR = 0.65, kWinRoll = 0.02;
const double kQSpread = 0.05, kPSpread = 0.5;

Symbol x_derivative_of(const Symbol& a) {
  Symbol d;
  d.ncomp = a.ncomp;
  d.class_order = a.class_order;
  d.max_derivative = a.max_derivative - 1;
  d.is_real = a.is_real;
  d.scalar = [a](int ax, int axi, double x, double xi) {
    return a.scalar(ax + 1, axi, x, xi);
  };
  return d;
}
}  // namespace

TEST_CASE("left vs weyl on (windowed x).xi differs by (ih/2) Op(dx xw)") {
  const Symbol xw = sym_windowed_x(kWinR, kWinRoll);
  const Symbol a = sym_product(xw, sym_xi());
  const GridOperator W = weyl_quantize(a, kWinGrid, kWinH);
  const GridOperator L = left_quantize(a, kWinGrid, kWinH);
  const GridOperator Dxw = weyl_quantize(x_derivative_of(xw), kWinGrid, kWinH);
  const MatrixXcd R = L.matrix - W.matrix - Complex(0.0, 0.5 * kWinH) * Dxw.matrix;
  CHECK(probe_residual(R, kWinGrid, kWinH, 8, kQSpread, kPSpread) < 1e-10);
  // the measured difference itself sits at the h/2 scale
  CHECK(probe_residual(L.matrix - W.matrix, kWinGrid, kWinH, 8, kQSpread, kPSpread) ==
        doctest::Approx(0.5 * kWinH).epsilon(1e-4));
}

TEST_CASE("moyal expansion is exact on coordinate symbols (probe residual)") {
  const Symbol xw = sym_windowed_x(kWinR, kWinRoll);
  const GridOperator X = weyl_quantize(xw, kWinGrid, kWinH);
  const GridOperator Xi = weyl_quantize(sym_xi(), kWinGrid, kWinH);
  const GridOperator XXi = weyl_quantize(sym_product(xw, sym_xi()), kWinGrid, kWinH);
  const GridOperator PB = weyl_quantize(sym_poisson(xw, sym_xi()), kWinGrid, kWinH);
  const MatrixXcd R = X.matrix * Xi.matrix - XXi.matrix -
                      Complex(0.0, -0.5 * kWinH) * PB.matrix;
  CHECK(probe_residual(R, kWinGrid, kWinH, 8, kQSpread, kPSpread) < 1e-10);

  // [Op(xi), Op(xw)] = (h/i) Op({xi, xw}); on the window {xi, xw} = 1
  const GridOperator PB2 = weyl_quantize(sym_poisson(sym_xi(), xw), kWinGrid, kWinH);
  const MatrixXcd C = Xi.matrix * X.matrix - X.matrix * Xi.matrix -
                      Complex(0.0, -kWinH) * PB2.matrix;
  CHECK(probe_residual(C, kWinGrid, kWinH, 8, kQSpread, kPSpread) < 1e-10);
  // and the bracket operator acts as the identity on window probes
  const MatrixXcd Cid = Xi.matrix * X.matrix - X.matrix * Xi.matrix -
                        Complex(0.0, -kWinH) *
                            MatrixXcd::Identity(X.dim(), X.dim());
  CHECK(probe_residual(Cid, kWinGrid, kWinH, 8, kQSpread, kPSpread) < 1e-10);
}

TEST_CASE("calculus residuals: vanishing bracket for a = b, O(h^2)/O(h^3) trend") {
  const Symbol a = sym_gaussian_bump(0.05, 0.1, 0.24, 0.3);
  const Symbol b = sym_gaussian_bump(-0.08, -0.12, 0.27, 0.33);

  // a = b: the bracket vanishes identically
  const Symbol pb = sym_poisson(a, a);
  CHECK(std::abs(pb.value(0.1, 0.2)) < 1e-14);

  std::vector<double> hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<double> prod, comm;
  for (double h : hs) {
    prod.push_back(calculus_residual_product(a, b, kGrid, h));
    comm.push_back(calculus_residual_commutator(a, b, kGrid, h));
  }
  // successive halvings: rates approach 4x (product) and 8x (commutator)
  CHECK(prod[0] / prod[1] > 2.7);
  CHECK(prod[1] / prod[2] > 3.2);
  CHECK(comm[0] / comm[1] > 5.0);
  CHECK(comm[1] / comm[2] > 6.5);
}

TEST_CASE("garding: constant symbol is the identity") {
  const GridOperator A = weyl_quantize(sym_constant(1.0), kGrid, kH);
  CHECK((A.matrix - MatrixXcd::Identity(A.dim(), A.dim())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(garding_min_eig(sym_constant(1.0), kGrid, kH) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("parametrix: pure multiplier is exact, ellipticity is enforced") {
  Symbol p = sym_polynomial({{1.0, 0, 2}, {1.0, 0, 0}});  // xi^2 + 1
  p.class_order = 2;
  CHECK(parametrix_residual(p, kGrid, kH) < 1e-10);

  // doubling the resolution leaves the multiplier residual at round-off
  const GridSpec fine = GridSpec::line(-1.25, 1.25, 512);
  CHECK(parametrix_residual(p, fine, kH) < 1e-10);

  // a symbol vanishing on the band is rejected
  Symbol bad = sym_polynomial({{1.0, 0, 2}, {-0.25, 0, 0}});  // xi^2 - 1/4
  bad.class_order = 2;
  CHECK_THROWS_AS(parametrix_residual(bad, kGrid, kH), std::invalid_argument);
}

TEST_CASE("parametrix: x-dependent elliptic symbol has small residual") {
  // p = xi^2 + 1 + V(x), V a small bump (xi-independent factor)
  Symbol p = sym_sum(sym_polynomial({{1.0, 0, 2}, {1.0, 0, 0}}),
                     sym_poly_times_gaussian({{0.3, 0, 0}}, 0.0, 0.0, 0.25, 1e9));
  p.class_order = 2;
  const double r64 = parametrix_residual(p, kGrid, 1.0 / 64);
  const double r128 = parametrix_residual(p, kGrid, 1.0 / 128);
  CHECK(r64 < 0.1);
  CHECK(r128 < r64);
  // first-order trend
  CHECK(r64 / r128 > 1.5);
  CHECK(r64 / r128 < 2.6);
}

TEST_CASE("function_of_operator: identity and constant functions") {
  const Symbol bump = sym_gaussian_bump(0.0, 0.0, 0.25, 0.3);
  const GridOperator A = weyl_quantize(bump, kGrid, kH);
  const GridOperator idA = function_of_operator(A, smooth_identity(-2.0, 2.0));
  CHECK((idA.matrix - A.matrix).cwiseAbs().maxCoeff() < 1e-10);
  const GridOperator one = function_of_operator(A, smooth_const(1.0, -2.0, 2.0));
  CHECK((one.matrix - MatrixXcd::Identity(A.dim(), A.dim())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("helffer-sjostrand matches the eigendecomposition route") {
  const GridSpec grid = GridSpec::line(-1.25, 1.25, 64);
  const double h = 1.0 / 32;
  const Symbol bump = sym_gaussian_bump(0.0, 0.0, 0.25, 0.3);
  const GridOperator A = weyl_quantize(bump, grid, h);
  const SmoothFunction F = smooth_gaussian(0.5, 0.25);

  // F = 0 gives the zero operator
  HelfferSjostrandOptions o0;
  o0.nx = 33;
  o0.ny = 9;
  const GridOperator zero = helffer_sjostrand(A, smooth_const(0.0, -1.0, 1.5), o0);
  CHECK(zero.matrix.cwiseAbs().maxCoeff() < 1e-14);

  const GridOperator exact = function_of_operator(A, F);
  HelfferSjostrandOptions fine;
  fine.order = 3;
  fine.nx = 257;
  fine.ny = 33;
  fine.y_max = 0.75;
  HelfferSjostrandReport rep;
  const GridOperator hs = helffer_sjostrand(A, F, fine, &rep);
  const double err_fine = operator_norm(hs.matrix - exact.matrix);
  CHECK(err_fine < 1e-4);
  CHECK(rep.resolvent_solves > 100);

  HelfferSjostrandOptions coarse = fine;
  coarse.nx = 129;
  coarse.ny = 17;
  const double err_coarse =
      operator_norm(helffer_sjostrand(A, F, coarse).matrix - exact.matrix);
  CHECK(err_coarse >= 2.0 * err_fine);
}

TEST_CASE("trace formula: zero function and Hilbert-Schmidt identity") {
  const Symbol bump = sym_gaussian_bump(0.0, 0.0, 0.22, 0.3);
  const TracePair z = trace_formula_check(bump, smooth_const(0.0, -1.0, 2.0), kGrid, kH);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  const HilbertSchmidtPair hsp = hilbert_schmidt_check(bump, kGrid, kH);
  const double expected = std::pow(2.0 * kPi * kH, -0.5) * hsp.symbol_l2;
  CHECK(std::abs(hsp.op_hs / expected - 1.0) < 0.01);
}

TEST_CASE("bargmann link: constant symbol reproduces the identity on probes") {
  const double res = bargmann_link_residual(sym_constant(1.0), kGrid, kH, 6);
  CHECK(res < 2e-3);  // quadrature-limited

  // Gaussian bump: first-order trend over an h halving
  const Symbol a = sym_gaussian_bump(0.0, 0.0, 0.3, 0.35);
  const double r1 = bargmann_link_residual(a, kGrid, 1.0 / 32, 6);
  const double r2 = bargmann_link_residual(a, kGrid, 1.0 / 64, 6);
  CHECK(r1 / r2 > 1.5);
  CHECK(r1 / r2 < 2.6);
}

TEST_CASE("matrix symbols quantize blockwise Hermitian") {
  const Symbol m = sym_rank_one_matrix_bump(0.25, 0.3);
  const GridOperator A = weyl_quantize(m, kGrid, kH);
  CHECK(A.ncomp == 2);
  CHECK(A.dim() == 2 * kGrid.size());
  CHECK(A.hermiticity_defect() < 1e-10);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (A.matrix + A.matrix.adjoint()),
                                              Eigen::EigenvaluesOnly);
  // nonnegative matrix symbol: spectrum bounded below by -O(h)
  CHECK(es.eigenvalues().minCoeff() > -1.0 * kH);
  CHECK(es.eigenvalues().minCoeff() < 0.0);
}

TEST_CASE("symbol derivative cross-check and seminorms") {
  const Symbol a = sym_gaussian_bump(0.1, -0.1, 0.3, 0.4, 0.7);
  CHECK(symbol_derivative_defect(a, kGrid, kH) < 1e-5);
  CHECK(a.seminorm(0, kGrid, kH) == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(a.seminorm(2, kGrid, kH) >= a.seminorm(1, kGrid, kH));

  const Symbol r = sym_reciprocal(sym_polynomial({{1.0, 0, 2}, {1.0, 0, 0}}), -2);
  CHECK(symbol_derivative_defect(r, kGrid, kH) < 1e-5);
}
