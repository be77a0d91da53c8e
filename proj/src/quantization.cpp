#include "sclab/quantization.hpp"

#include "sclab/fft.hpp"
#include "sclab/transforms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <sstream>

namespace sclab::quantization {

double GridOperator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

WaveField GridOperator::apply(const WaveField& f) const {
  if (ncomp != 1) throw DimensionError("GridOperator::apply: field form needs ncomp == 1");
  if (!(f.grid == grid)) throw DimensionError("GridOperator::apply: grid mismatch");
  return WaveField(grid, h, matrix * f.samples);
}

namespace {

void check_1d(const GridSpec& grid) {
  if (grid.dim() != 1)
    throw DimensionError("quantization: dense operators are built on 1-D grids");
}

double taper_weight(Index s_abs, Index n) {
  const double q = double(s_abs) / double(n / 2);  // 0..1 across the band
  if (q <= 0.5) return 1.0;
  const double u = (q - 0.5) / 0.5;
  const double c = std::cos(0.5 * kPi * u);
  return c * c;
}

/// Kernel rows: for midpoint index tau on the doubled grid, and lag delta,
/// G(tau, delta) = sum_s a(X_tau, xi_s) w(s) e^{2 pi i s delta / n}.
/// Assembled per matrix component by FFT over the xi grid. The unpaired
/// Nyquist slot is replaced by the average of the symbol at +-xi_Nyquist:
/// exact for even symbols and removes the asymmetry artifact for odd ones.
MatrixXcd kernel_rows(const Symbol& a, int alpha, int beta, const GridSpec& grid, double h,
                      bool taper, bool midpoints) {
  const Index n = grid.count(0);
  const double dx2 = 0.5 * grid.spacing(0);
  const GridSpec pgrid = grid.momentum_grid(h);
  const Index rows = midpoints ? 2 * n : n;
  MatrixXcd G(rows, n);
  parallel_for(rows, [&](Index r) {
    const Index tau = midpoints ? r : 2 * r;
    const double x = grid.lo()[0] + dx2 * double(tau);
    auto eval = [&](double xi) -> Complex {
      return (a.ncomp == 1) ? a.scalar(0, 0, x, xi) : a.matrix(0, 0, x, xi)(alpha, beta);
    };
    VectorXcd row(n);
    for (Index m = 0; m < n; ++m) {
      const double xi = pgrid.point(0, m);
      Complex v = (m == 0) ? 0.5 * (eval(xi) + eval(-xi)) : eval(xi);
      if (taper) v *= taper_weight(std::abs(m - n / 2), n);
      row[m] = v;
    }
    row = natural_to_fft_order(row, grid.counts());
    fft::inverse(row);  // unnormalized: sum_k row_k e^{+2 pi i k delta/n}
    G.row(r) = row.transpose();
  });
  return G;
}

GridOperator quantize_impl(const Symbol& a, const GridSpec& grid, double h,
                           const QuantizeOptions& opts, QuantizeDiagnostics* diag,
                           bool weyl) {
  check_1d(grid);
  const Index n = grid.count(0);
  const int N = a.ncomp;
  const double pref = 1.0 / double(n);  // dx / L

  GridOperator op;
  op.grid = grid;
  op.h = h;
  op.ncomp = N;
  op.tag = weyl ? OpTag::weyl : OpTag::left;
  op.matrix.resize(N * n, N * n);

  for (int alpha = 0; alpha < N; ++alpha) {
    for (int beta = 0; beta < N; ++beta) {
      const MatrixXcd G =
          kernel_rows(a, alpha, beta, grid, h, opts.taper_top_octave, weyl);
      auto block = op.matrix.block(alpha * n, beta * n, n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          // short-arc lag in [-n/2, n/2)
          Index delta = i - j;
          delta = ((delta + n / 2) % n + n) % n - n / 2;
          const Index col = (delta % n + n) % n;
          if (!weyl) {
            block(i, j) = pref * G(i, col);
            continue;
          }
          const Index row = ((2 * i - delta) % (2 * n) + 2 * n) % (2 * n);
          if (delta == -n / 2) {
            // both arcs are equally short: average the two midpoints
            block(i, j) = 0.5 * pref * (G(row, col) + G((row + n) % (2 * n), col));
          } else {
            block(i, j) = pref * G(row, col);
          }
        }
      }
    }
  }

  if (diag) {
    diag->band_edge_fraction = a.band_edge_fraction(grid, h);
    diag->band_limit_warning =
        !opts.taper_top_octave && a.class_order <= 0 &&
        diag->band_edge_fraction > opts.band_warn_fraction;
  }
  return op;
}

}  // namespace

GridOperator weyl_quantize(const Symbol& a, const GridSpec& grid, double h,
                           const QuantizeOptions& opts, QuantizeDiagnostics* diag) {
  return quantize_impl(a, grid, h, opts, diag, true);
}

GridOperator left_quantize(const Symbol& a, const GridSpec& grid, double h,
                           const QuantizeOptions& opts, QuantizeDiagnostics* diag) {
  return quantize_impl(a, grid, h, opts, diag, false);
}

GridOperator weyl_quantize_tables(const std::vector<MatrixXcd>& blocks, int ncomp,
                                  const GridSpec& grid, double h) {
  check_1d(grid);
  const Index n = grid.count(0);
  if (Index(blocks.size()) != Index(ncomp) * ncomp)
    throw DimensionError("weyl_quantize_tables: need ncomp^2 blocks");
  const double pref = 1.0 / double(n);

  GridOperator op;
  op.grid = grid;
  op.h = h;
  op.ncomp = ncomp;
  op.tag = OpTag::weyl;
  op.matrix.resize(ncomp * n, ncomp * n);

  for (int alpha = 0; alpha < ncomp; ++alpha) {
    for (int beta = 0; beta < ncomp; ++beta) {
      const MatrixXcd& tab = blocks[alpha * ncomp + beta];
      if (tab.rows() != 2 * n || tab.cols() != n)
        throw DimensionError("weyl_quantize_tables: table must be 2n x n");
      MatrixXcd G(2 * n, n);
      parallel_for(2 * n, [&](Index tau) {
        VectorXcd row = tab.row(tau).transpose();
        row = natural_to_fft_order(row, grid.counts());
        fft::inverse(row);
        G.row(tau) = row.transpose();
      });
      auto block = op.matrix.block(alpha * n, beta * n, n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          Index delta = i - j;
          delta = ((delta + n / 2) % n + n) % n - n / 2;
          const Index col = (delta % n + n) % n;
          const Index row = ((2 * i - delta) % (2 * n) + 2 * n) % (2 * n);
          if (delta == -n / 2) {
            block(i, j) = 0.5 * pref * (G(row, col) + G((row + n) % (2 * n), col));
          } else {
            block(i, j) = pref * G(row, col);
          }
        }
      }
    }
  }
  return op;
}

double operator_norm(const MatrixXcd& m, double rel_tol, int max_iters) {
  const Index n = m.cols();
  VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(1.0 + 0.3 * std::cos(0.7 * double(i)),
                                               0.2 * std::sin(1.3 * double(i)));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    VectorXcd w = m * v;
    const double s = w.norm();
    if (s == 0.0) return 0.0;
    v = m.adjoint() * w;
    const double nv = v.norm();
    if (nv == 0.0) return s;
    v /= nv;
    const double next = std::sqrt(nv);
    if (it > 4 && std::abs(next - sigma) <= rel_tol * next) return next;
    sigma = next;
  }
  return sigma;
}

double probe_residual(const MatrixXcd& R, const GridSpec& grid, double h, int nprobes,
                      double q_spread, double p_spread) {
  const Index n = grid.count(0);
  const Index dim = R.cols();
  const int ncomp = static_cast<int>(dim / n);
  const double cx = 0.5 * (grid.lo()[0] + grid.hi()[0]);
  const double qr = q_spread;
  const double pr = p_spread;
  const double pref = std::pow(kPi * h, -0.25);
  double worst = 0.0;
  for (int k = 0; k < nprobes; ++k) {
    const double frac = nprobes > 1 ? double(k) / double(nprobes - 1) : 0.5;
    const double q = cx - qr + 2.0 * qr * frac;
    const double p = -pr + 2.0 * pr * (1.0 - frac);
    VectorXcd phi = VectorXcd::Zero(dim);
    for (Index i = 0; i < n; ++i) {
      const double u = grid.point(0, i) - q;
      const Complex val =
          pref * std::exp(-u * u / (2.0 * h)) * std::exp(Complex(0.0, p * u / h));
      for (int c = 0; c < ncomp; ++c) phi[c * n + i] = val / std::sqrt(double(ncomp));
    }
    const double nphi = phi.norm();
    worst = std::max(worst, (R * phi).norm() / nphi);
  }
  return worst;
}

double calculus_residual_product(const Symbol& a, const Symbol& b, const GridSpec& grid,
                                 double h) {
  const GridOperator A = weyl_quantize(a, grid, h);
  const GridOperator B = weyl_quantize(b, grid, h);
  const GridOperator AB = weyl_quantize(sym_product(a, b), grid, h);
  const GridOperator P = weyl_quantize(sym_poisson(a, b), grid, h);
  const MatrixXcd R =
      A.matrix * B.matrix - AB.matrix - Complex(0.0, -0.5 * h) * P.matrix;
  return operator_norm(R);
}

double calculus_residual_commutator(const Symbol& a, const Symbol& b, const GridSpec& grid,
                                    double h) {
  const GridOperator A = weyl_quantize(a, grid, h);
  const GridOperator B = weyl_quantize(b, grid, h);
  const GridOperator P = weyl_quantize(sym_poisson(a, b), grid, h);
  const MatrixXcd R = A.matrix * B.matrix - B.matrix * A.matrix -
                      Complex(0.0, -h) * P.matrix;
  return operator_norm(R);
}

double garding_min_eig(const Symbol& a, const GridSpec& grid, double h) {
  if (!a.is_real) throw std::invalid_argument("garding_min_eig: symbol must be real");
  const GridOperator A = weyl_quantize(a, grid, h);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (A.matrix + A.matrix.adjoint()),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double parametrix_residual(const Symbol& p, const GridSpec& grid, double h,
                           double ellipticity_floor) {
  check_1d(grid);
  const GridSpec pg = grid.momentum_grid(h);
  const Index n = grid.count(0);
  double cmin = std::numeric_limits<double>::max();
  double bad_x = 0.0, bad_xi = 0.0;
  for (Index i = 0; i < n; i += std::max<Index>(1, n / 256)) {
    for (Index m = 0; m < n; ++m) {
      const double x = grid.point(0, i), xi = pg.point(0, m);
      const double w = std::abs(p.value(x, xi)) /
                       std::pow(1.0 + xi * xi, 0.5 * p.class_order);
      if (w < cmin) {
        cmin = w;
        bad_x = x;
        bad_xi = xi;
      }
    }
  }
  if (cmin < ellipticity_floor) {
    std::ostringstream os;
    os << "parametrix_residual: ellipticity violated on the grid band at (x, xi) = ("
       << bad_x << ", " << bad_xi << "), |p|/<xi>^m = " << cmin;
    throw std::invalid_argument(os.str());
  }
  const GridOperator P = left_quantize(p, grid, h);
  const GridOperator Q = weyl_quantize(sym_reciprocal(p, -p.class_order), grid, h);
  const MatrixXcd R =
      Q.matrix * P.matrix - MatrixXcd::Identity(P.dim(), P.dim());
  return operator_norm(R);
}

GridOperator function_of_operator(const GridOperator& A, const SmoothFunction& F,
                                  double hermitian_tol) {
  if (A.hermiticity_defect() > hermitian_tol)
    throw std::invalid_argument("function_of_operator: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (A.matrix + A.matrix.adjoint()));
  VectorXd fe(es.eigenvalues().size());
  for (Index i = 0; i < fe.size(); ++i) fe[i] = F(es.eigenvalues()[i]);
  GridOperator out = A;
  out.tag = OpTag::function_of;
  out.matrix = es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().adjoint();
  return out;
}

namespace {

/// Gauss-Legendre nodes/weights on [a, b] by Newton iteration.
void gauss_legendre(int n, double a, double b, std::vector<double>& xs,
                    std::vector<double>& ws) {
  xs.resize(n);
  ws.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      const double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
    }
    xs[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    xs[i] = 0.5 * (b - a) * xs[i] + 0.5 * (a + b);
    ws[i] *= 0.5 * (b - a);
  }
}

double aa_cutoff(double u) {
  const double a = std::abs(u);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double c = std::cos(kPi * (a - 0.5));
  return c * c;
}

double aa_cutoff_deriv(double u) {
  const double a = std::abs(u);
  if (a <= 0.5 || a >= 1.0) return 0.0;
  const double d = -kPi * std::sin(2.0 * kPi * (a - 0.5));
  return u >= 0 ? d : -d;
}

/// dbar of the order-n almost analytic extension of F at z = x + iy.
Complex dbar_extension(const SmoothFunction& F, int n, double ymax, double x, double y) {
  const Complex iy(0.0, y);
  Complex pw = 1.0;  // (iy)^k / k!
  Complex series = F.deriv(0, x);
  Complex top = pw;
  for (int k = 1; k <= n; ++k) {
    pw *= iy / double(k);
    series += F.deriv(k, x) * pw;
    top = pw;
  }
  const double chi = aa_cutoff(y / ymax);
  const double chi_d = aa_cutoff_deriv(y / ymax) / ymax;
  const Complex lead = 0.5 * chi * F.deriv(n + 1, x) * top;  // (iy)^n/n! term
  const Complex cut = 0.5 * Complex(0.0, 1.0) * chi_d * series;
  return lead + cut;
}

}  // namespace

GridOperator helffer_sjostrand(const GridOperator& A, const SmoothFunction& F,
                               const HelfferSjostrandOptions& opts,
                               HelfferSjostrandReport* report) {
  if (opts.order < 2)
    throw std::invalid_argument("helffer_sjostrand: order must be >= 2");
  if (A.hermiticity_defect() > 1e-8)
    throw std::invalid_argument("helffer_sjostrand: operator is not Hermitian");

  const Index dim = A.dim();
  const double xlo = F.support_lo, xhi = F.support_hi;
  if (!(xhi > xlo)) throw std::invalid_argument("helffer_sjostrand: empty support");

  std::vector<double> xq, wx, yq, wy;
  gauss_legendre(opts.nx, xlo, xhi, xq, wx);
  gauss_legendre(opts.ny, 0.0, opts.y_max, yq, wy);

  MatrixXcd acc = MatrixXcd::Zero(dim, dim);
  const MatrixXcd I = MatrixXcd::Identity(dim, dim);
  int solves = 0;
  double wmass = 0.0;

  // upper half plane only; the lower half contributes the adjoint because
  // A is Hermitian and F real
  for (int jy = 0; jy < opts.ny; ++jy) {
    const double y = yq[jy];
    for (int jx = 0; jx < opts.nx; ++jx) {
      const double x = xq[jx];
      const Complex w = dbar_extension(F, opts.order, opts.y_max, x, y) * wx[jx] * wy[jy];
      if (std::abs(w) < 1e-17) continue;
      const Complex z(x, y);
      Eigen::PartialPivLU<MatrixXcd> lu(A.matrix - z * I);
      const MatrixXcd R = lu.solve(I);
      acc += w * R;
      ++solves;
      wmass += std::abs(w);
    }
  }
  GridOperator out = A;
  out.tag = OpTag::function_of;
  out.matrix = (acc + acc.adjoint()) / kPi;
  if (report) {
    report->resolvent_solves = solves;
    report->quadrature_weight_mass = 2.0 * wmass;
  }
  return out;
}

TracePair trace_formula_check(const Symbol& a, const SmoothFunction& F, const GridSpec& grid,
                              double h) {
  check_1d(grid);
  const GridOperator A = weyl_quantize(a, grid, h);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (A.matrix + A.matrix.adjoint()),
                                              Eigen::EigenvaluesOnly);
  TracePair out;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) out.lhs += F(es.eigenvalues()[i]);

  const GridSpec pg = grid.momentum_grid(h);
  const double cell = grid.spacing(0) * pg.spacing(0);
  double acc = 0.0;
  for (Index i = 0; i < grid.count(0); ++i)
    for (Index m = 0; m < pg.count(0); ++m)
      acc += F(std::real(a.value(grid.point(0, i), pg.point(0, m))));
  out.rhs = acc * cell / (2.0 * kPi * h);
  return out;
}

HilbertSchmidtPair hilbert_schmidt_check(const Symbol& a, const GridSpec& grid, double h) {
  check_1d(grid);
  const GridOperator A = weyl_quantize(a, grid, h);
  HilbertSchmidtPair out;
  out.op_hs = A.matrix.norm();
  const GridSpec pg = grid.momentum_grid(h);
  double acc = 0.0;
  for (Index i = 0; i < grid.count(0); ++i)
    for (Index m = 0; m < pg.count(0); ++m)
      acc += std::norm(a.value(grid.point(0, i), pg.point(0, m)));
  out.symbol_l2 = std::sqrt(acc * grid.spacing(0) * pg.spacing(0));
  return out;
}

double bargmann_link_residual(const Symbol& a, const GridSpec& grid, double h, int n_probes,
                              std::uint64_t seed) {
  check_1d(grid);
  const GridOperator A = weyl_quantize(a, grid, h);
  const Index n = grid.count(0);
  const double rh = std::sqrt(h);
  const double cx = 0.5 * (grid.lo()[0] + grid.hi()[0]);

  // probe family: coherent states spread over the symbol's core plus
  // seeded band-limited random fields
  std::vector<WaveField> probes;
  CounterRng rng(seed);
  const double pref = std::pow(kPi * h, -0.25);
  for (int k = 0; k < n_probes; ++k) {
    if (k < n_probes / 2) {
      const double q = cx + 0.5 * (rng.uniform(3 * k) - 0.5);
      const double p = 0.8 * (rng.uniform(3 * k + 1) - 0.5);
      probes.push_back(WaveField::from_profile(grid, h, [&](const VectorXd& x) {
        const double u = x[0] - q;
        return pref * std::exp(-u * u / (2.0 * h)) * std::exp(Complex(0.0, p * u / h));
      }));
    } else {
      // random field band-limited to the lower quarter band, localized
      WaveField f(grid, h);
      VectorXcd coef = VectorXcd::Zero(n);
      for (Index m = 0; m < n; ++m) {
        if (std::abs(m - n / 2) > n / 8) continue;
        coef[m] = Complex(rng.normal(10000 + k * 4096 + 2 * m),
                          rng.normal(20000 + k * 4096 + 2 * m + 1));
      }
      coef = natural_to_fft_order(coef, grid.counts());
      fft::inverse(coef);
      for (Index i = 0; i < n; ++i) {
        const double u = (grid.point(0, i) - cx) / (grid.length(0) / 6.0);
        f.samples[i] = coef[i] * std::exp(-u * u);
      }
      f.normalize();
      probes.push_back(std::move(f));
    }
  }

  // z-grid covering probes and symbol support with sqrt(h)/2 spacing
  transforms::BargmannOptions bopt;
  bopt.margin_sqrt_h = 8.0;
  double worst = 0.0;
  for (const auto& phi : probes) {
    const VectorXcd lhs = A.matrix * phi.samples;
    transforms::BargmannDiagnostics bd;
    PhaseSpaceField B = transforms::bargmann(phi, bopt, &bd);
    for (Index iq = 0; iq < B.xgrid.size(); ++iq)
      for (Index ip = 0; ip < B.xigrid.size(); ++ip)
        B.values[B.flat(iq, ip)] *=
            a.value(B.xgrid.point(0, iq), B.xigrid.point(0, ip));
    const WaveField rhs = transforms::bargmann_synthesis(B, grid);
    const double err = std::sqrt((lhs - rhs.samples).squaredNorm() * grid.cell_volume());
    worst = std::max(worst, err / phi.norm());
  }
  return worst;
}

}  // namespace sclab::quantization
