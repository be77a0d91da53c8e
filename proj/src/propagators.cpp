#include "sclab/propagators.hpp"

#include "sclab/fft.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>
#include <tuple>

namespace sclab::propagators {

// ---------------------------------------------------------------------------
// split-step
// ---------------------------------------------------------------------------

namespace {

VectorXd kinetic_fft_order(const GridSpec& grid, double h) {
  const Index total = grid.size();
  VectorXd k(total);
  for (Index f = 0; f < total; ++f) {
    const VectorXi idx = grid.unflat(f);
    double acc = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const Index n = grid.count(a);
      const Index bin = idx[a];
      const Index s = bin <= n / 2 ? bin : bin - n;  // fft-order signed frequency
      const double xi = 2.0 * kPi * h / grid.length(a) * double(s);
      acc += 0.5 * xi * xi;
    }
    k[f] = acc;
  }
  return k;
}

double band_edge_kinetic(const GridSpec& grid, double h) {
  double acc = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double ximax = kPi * h * double(grid.count(a)) / grid.length(a);
    acc += 0.5 * ximax * ximax;
  }
  return acc;
}

}  // namespace

double SplitStepPropagator::max_step(const GridSpec& grid, double h) {
  return 0.25 * kPi * h / band_edge_kinetic(grid, h);
}

SplitStepPropagator::SplitStepPropagator(GridSpec grid, double h, VectorXd potential,
                                         double dt)
    : grid_(std::move(grid)), h_(h), potential_(std::move(potential)), dt_(dt) {
  if (potential_.size() != grid_.size())
    throw DimensionError("SplitStepPropagator: potential size mismatch");
  const double cap = max_step(grid_, h_);
  if (dt_ > cap) {
    std::ostringstream os;
    os << "SplitStepPropagator: dt = " << dt_
       << " exceeds the band-edge phase budget; use dt <= " << cap;
    throw std::invalid_argument(os.str());
  }
  kinetic_ = kinetic_fft_order(grid_, h_);
}

WaveField SplitStepPropagator::propagate(const WaveField& psi0, double t) const {
  if (!(psi0.grid == grid_)) throw DimensionError("SplitStepPropagator: grid mismatch");
  if (t == 0.0) return psi0;
  const long steps = std::max<long>(1, std::lround(t / dt_));
  const double dt = t / double(steps);
  if (dt > 1.0000001 * max_step(grid_, h_))
    throw std::invalid_argument("SplitStepPropagator: effective dt exceeds the budget");

  const Index total = grid_.size();
  VectorXcd half_v(total), full_v(total), kin(total);
  for (Index i = 0; i < total; ++i) {
    half_v[i] = std::exp(Complex(0.0, -0.5 * dt * potential_[i] / h_));
    full_v[i] = half_v[i] * half_v[i];
  }
  for (Index i = 0; i < total; ++i) kin[i] = std::exp(Complex(0.0, -dt * kinetic_[i] / h_));

  VectorXcd cur = psi0.samples;
  const double inv_n = 1.0 / double(total);
  cur.array() *= half_v.array();
  for (long s = 0; s < steps; ++s) {
    fft::forward_nd(cur, grid_.counts());
    cur.array() *= kin.array();
    fft::inverse_nd(cur, grid_.counts());
    cur *= inv_n;
    if (s + 1 < steps)
      cur.array() *= full_v.array();
    else
      cur.array() *= half_v.array();
  }
  return WaveField(grid_, h_, std::move(cur));
}

// ---------------------------------------------------------------------------
// eigendecomposition propagator
// ---------------------------------------------------------------------------

EigenPropagator::EigenPropagator(const quantization::GridOperator& H)
    : grid_(H.grid), h_(H.h), ncomp_(H.ncomp) {
  if (H.hermiticity_defect() > 1e-8)
    throw std::invalid_argument("EigenPropagator: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (H.matrix + H.matrix.adjoint()));
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

MatrixXcd EigenPropagator::unitary(double t) const {
  VectorXcd ph(evals_.size());
  for (Index i = 0; i < ph.size(); ++i)
    ph[i] = std::exp(Complex(0.0, -evals_[i] * t / h_));
  return evecs_ * ph.asDiagonal() * evecs_.adjoint();
}

WaveField EigenPropagator::propagate(const WaveField& psi0, double t) const {
  if (ncomp_ != 1) throw DimensionError("EigenPropagator: field form needs ncomp == 1");
  if (!(psi0.grid == grid_)) throw DimensionError("EigenPropagator: grid mismatch");
  VectorXcd c = evecs_.adjoint() * psi0.samples;
  for (Index i = 0; i < c.size(); ++i)
    c[i] *= std::exp(Complex(0.0, -evals_[i] * t / h_));
  return WaveField(grid_, h_, evecs_ * c);
}

// ---------------------------------------------------------------------------
// thawed / frozen Gaussian propagators
// ---------------------------------------------------------------------------

Complex hk_prefactor(const FlowData& fd, double tracked_arg) {
  const int d = static_cast<int>(fd.A.rows());
  const MatrixXcd M = (fd.A + fd.D).cast<Complex>() + kI * (fd.C - fd.B).cast<Complex>();
  const double mod = std::sqrt(std::abs(M.determinant()));
  return std::pow(2.0, -0.5 * d) * mod * std::exp(Complex(0.0, 0.5 * tracked_arg));
}

namespace {

struct FioSample {
  double q = 0, p = 0;          // transported center
  MatrixXcd gamma;              // thawed covariance (unused for frozen)
  Complex coeff;                // full complex weight of the packet
};

WaveField fio_apply(const Hamiltonian& ham, const WaveField& psi0, double t, bool frozen,
                    const FioOptions& opts, FioReport* report) {
  if (psi0.grid.dim() != 1)
    throw DimensionError("fio_apply: implemented for 1-D fields");
  const double h = psi0.h;

  transforms::BargmannOptions bopt;
  bopt.coverage_tol = opts.coverage_tol;
  bopt.margin_sqrt_h = opts.margin_sqrt_h;
  bopt.max_spacing_sqrt_h = opts.spacing_sqrt_h;
  transforms::BargmannDiagnostics bdiag;
  const PhaseSpaceField B = transforms::bargmann(psi0, bopt, &bdiag);

  const double wmax = B.values.cwiseAbs().maxCoeff();
  std::vector<std::pair<Index, Index>> nodes;
  for (Index iq = 0; iq < B.xgrid.size(); ++iq)
    for (Index ip = 0; ip < B.xigrid.size(); ++ip)
      if (std::abs(B.values[B.flat(iq, ip)]) >= opts.weight_cutoff * wmax)
        nodes.emplace_back(iq, ip);

  std::vector<FioSample> samples(nodes.size());
  std::vector<double> jumps(nodes.size(), 0.0);
  parallel_for(Index(nodes.size()), [&](Index k) {
    const auto [iq, ip] = nodes[k];
    PhasePoint z0;
    z0.q = VectorXd::Constant(1, B.xgrid.point(0, iq));
    z0.p = VectorXd::Constant(1, B.xigrid.point(0, ip));

    double arg_acc = 0.0, max_jump = 0.0;
    Complex det_prev(1.0, 0.0);
    bool first = true;
    FlowObserver track = [&](const FlowData& fd) {
      Complex det;
      if (frozen) {
        const MatrixXcd M =
            (fd.A + fd.D).cast<Complex>() + kI * (fd.C - fd.B).cast<Complex>();
        det = M.determinant();
      } else {
        const MatrixXcd M = fd.A.cast<Complex>() + kI * fd.B.cast<Complex>();
        det = M.determinant();
      }
      if (first) {
        det_prev = det;
        first = false;
        return true;
      }
      const double jump = std::arg(det / det_prev);
      arg_acc += jump;
      max_jump = std::max(max_jump, std::abs(jump));
      det_prev = det;
      return true;
    };

    const FlowData fd = flow(ham, z0, 0.0, t, opts.ode_tol, track);
    jumps[k] = max_jump;

    FioSample s;
    s.q = fd.endpoint.q[0];
    s.p = fd.endpoint.p[0];
    const Complex bval = B.values[B.flat(iq, ip)];
    const double dz = B.cell_volume();
    const double pref = std::pow(2.0 * kPi * h, -0.5);  // with Bargmann normalization
    if (frozen) {
      const Complex k_hk = hk_prefactor(fd, arg_acc);
      s.coeff = pref * dz * bval * k_hk * std::exp(Complex(0.0, fd.action / h));
      s.gamma = kI * MatrixXcd::Identity(1, 1);
    } else {
      const MatrixXcd M = fd.A.cast<Complex>() + kI * fd.B.cast<Complex>();
      const MatrixXcd num = fd.C.cast<Complex>() + kI * fd.D.cast<Complex>();
      MatrixXcd g = num * M.inverse();
      g = 0.5 * (g + g.transpose().eval());
      s.gamma = g;
      s.coeff = pref * dz * bval *
                std::exp(Complex(0.0, fd.action / h - 0.5 * arg_acc));
    }
    samples[k] = s;
  });

  double max_jump_all = 0.0;
  for (double j : jumps) max_jump_all = std::max(max_jump_all, j);
  if (max_jump_all >= opts.max_branch_jump)
    throw std::runtime_error(
        "fio_apply: prefactor branch jump too large; refine the time sampling");

  // superpose packets; loop order fixed for bitwise reproducibility
  WaveField out(psi0.grid, h);
  const double window = 14.0 * std::sqrt(h);
  const double c_norm = std::pow(kPi * h, -0.25);
  parallel_for(psi0.grid.size(), [&](Index i) {
    const double x = psi0.grid.point(0, i);
    Complex acc = 0.0;
    for (const FioSample& s : samples) {
      const double u = x - s.q;
      if (std::abs(u) > window) continue;
      const Complex g = s.gamma(0, 0);
      const double cg = c_norm * std::pow(g.imag(), 0.25);
      acc += s.coeff * cg *
             std::exp(Complex(0.0, 0.5 * u * u / h) * g + Complex(0.0, s.p * u / h));
    }
    out.samples[i] = acc;
  });

  if (report) {
    report->samples = Index(samples.size());
    report->coverage_deficit = bdiag.mass_deficit;
    report->max_branch_step = max_jump_all;
  }
  return out;
}

}  // namespace

WaveField thawed_fio_apply(const Hamiltonian& ham, const WaveField& psi0, double t,
                           const FioOptions& opts, FioReport* report) {
  return fio_apply(ham, psi0, t, false, opts, report);
}

WaveField frozen_fio_apply(const Hamiltonian& ham, const WaveField& psi0, double t,
                           const FioOptions& opts, FioReport* report) {
  return fio_apply(ham, psi0, t, true, opts, report);
}

// ---------------------------------------------------------------------------
// transported-symbol cache and Egorov check
// ---------------------------------------------------------------------------

SymbolTransportCache::SymbolTransportCache(const Hamiltonian& ham, const Symbol& a, double s,
                                           double t, const GridSpec& xgrid, double h_finest,
                                           double ode_tol)
    : ham_(&ham), a_(&a), s_(s), t_(t), xgrid_(xgrid), ode_tol_(ode_tol) {
  dxi_fine_ = 2.0 * kPi * h_finest / xgrid.length(0);

  // locate supp(a) on a dense scan of the box times a fixed physical band
  const double scan_xi = 8.0;
  double ax_lo = 1e300, ax_hi = -1e300, axi_lo = 1e300, axi_hi = -1e300;
  double sup = 0.0;
  const Index sn = 512;
  auto scan_value = [&](Index i, Index m) {
    const double x = xgrid.lo()[0] + xgrid.length(0) * double(i) / double(sn);
    const double xi = -scan_xi + 2.0 * scan_xi * double(m) / double(sn);
    return std::tuple{x, xi, a.value_m(x, xi).cwiseAbs().maxCoeff()};
  };
  for (Index i = 0; i <= sn; ++i)
    for (Index m = 0; m <= sn; ++m) sup = std::max(sup, std::get<2>(scan_value(i, m)));
  for (Index i = 0; i <= sn; ++i)
    for (Index m = 0; m <= sn; ++m) {
      const auto [x, xi, v] = scan_value(i, m);
      if (v > 1e-13 * sup) {
        ax_lo = std::min(ax_lo, x);
        ax_hi = std::max(ax_hi, x);
        axi_lo = std::min(axi_lo, xi);
        axi_hi = std::max(axi_hi, xi);
      }
    }

  // backward images of the support corners/edges bound the node region
  x_lo_ = 1e300;
  x_hi_ = -1e300;
  xi_lo_ = 1e300;
  xi_hi_ = -1e300;
  const int edge = 8;
  for (int i = 0; i <= edge; ++i) {
    for (int m = 0; m <= edge; ++m) {
      if (i != 0 && i != edge && m != 0 && m != edge) continue;
      PhasePoint z;
      z.q = VectorXd::Constant(1, ax_lo + (ax_hi - ax_lo) * double(i) / edge);
      z.p = VectorXd::Constant(1, axi_lo + (axi_hi - axi_lo) * double(m) / edge);
      VectorXd y0 = z.joint();
      auto rhs = [&](double tt, const VectorXd& y, VectorXd& dy) {
        PhasePoint w{y.head(1), y.tail(1)};
        const VectorXd g = ham_->gradient(tt, w);
        dy.resize(2);
        dy[0] = g[1];
        dy[1] = -g[0];
      };
      const VectorXd yb = integrate_rk45(rhs, t_, s_, y0, OdeOptions{.tol = 1e-8});
      x_lo_ = std::min(x_lo_, yb[0]);
      x_hi_ = std::max(x_hi_, yb[0]);
      xi_lo_ = std::min(xi_lo_, yb[1]);
      xi_hi_ = std::max(xi_hi_, yb[1]);
    }
  }
  const double mx = 0.15 * (x_hi_ - x_lo_) + 0.05;
  const double mxi = 0.15 * (xi_hi_ - xi_lo_) + 0.05;
  x_lo_ -= mx;
  x_hi_ += mx;
  xi_lo_ -= mxi;
  xi_hi_ += mxi;
}

Index SymbolTransportCache::xi_key(double xi) const {
  const double k = xi / dxi_fine_;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-6)
    throw std::invalid_argument("SymbolTransportCache: xi off the shared lattice");
  return Index(r);
}

double SymbolTransportCache::solve_node(Index tau, double xi) const {
  const double x = xgrid_.lo()[0] + 0.5 * xgrid_.spacing(0) * double(tau);
  if (x < x_lo_ || x > x_hi_ || xi < xi_lo_ || xi > xi_hi_) return 0.0;
  VectorXd y0(2);
  y0 << x, xi;
  auto rhs = [&](double tt, const VectorXd& y, VectorXd& dy) {
    PhasePoint w{y.head(1), y.tail(1)};
    const VectorXd g = ham_->gradient(tt, w);
    dy.resize(2);
    dy[0] = g[1];
    dy[1] = -g[0];
  };
  const VectorXd yt = integrate_rk45(rhs, s_, t_, y0, OdeOptions{.tol = ode_tol_});
  return std::real(a_->value_m(yt[0], yt[1])(0, 0));
}

double SymbolTransportCache::value(Index tau, double xi) {
  const double x = xgrid_.lo()[0] + 0.5 * xgrid_.spacing(0) * double(tau);
  if (x < x_lo_ || x > x_hi_ || xi < xi_lo_ || xi > xi_hi_) return 0.0;
  const Index key = xi_key(xi);
  const auto it = values_.find({tau, key});
  if (it != values_.end()) return it->second;
  const double v = solve_node(tau, xi);
  values_[{tau, key}] = v;
  return v;
}

void SymbolTransportCache::prepare(double h) {
  const Index n = xgrid_.count(0);
  const GridSpec pg = xgrid_.momentum_grid(h);
  std::vector<std::pair<Index, Index>> missing;
  std::vector<double> xis;
  for (Index tau = 0; tau < 2 * n; ++tau) {
    const double x = xgrid_.lo()[0] + 0.5 * xgrid_.spacing(0) * double(tau);
    if (x < x_lo_ || x > x_hi_) continue;
    for (Index m = 0; m < n; ++m) {
      const double xi = pg.point(0, m);
      if (xi < xi_lo_ || xi > xi_hi_) continue;
      const Index key = xi_key(xi);
      if (!values_.count({tau, key})) {
        missing.emplace_back(tau, key);
        xis.push_back(xi);
      }
    }
  }
  std::vector<double> vals(missing.size());
  parallel_for(Index(missing.size()),
               [&](Index k) { vals[k] = solve_node(missing[k].first, xis[k]); });
  for (size_t k = 0; k < missing.size(); ++k) values_[missing[k]] = vals[k];
}

EgorovResult egorov_evolve(const Symbol& p_sym, const Hamiltonian& ham, const Symbol& a,
                           double s, double t, const GridSpec& grid, double h,
                           SymbolTransportCache* cache) {
  using quantization::GridOperator;
  const GridOperator H = quantization::weyl_quantize(p_sym, grid, h);
  const EigenPropagator U(H);
  const MatrixXcd Ut = U.unitary(t - s);

  const GridOperator A = quantization::weyl_quantize(a, grid, h);

  EgorovResult out;
  out.conjugated = A;
  out.conjugated.tag = quantization::OpTag::other;
  out.conjugated.matrix = Ut.adjoint() * A.matrix * Ut;

  // transported symbol a(Phi^{t,s}) tabulated on the doubled grid
  const Index n = grid.count(0);
  const GridSpec pg = grid.momentum_grid(h);
  std::optional<SymbolTransportCache> local;
  SymbolTransportCache* c = cache;
  if (!c) {
    local.emplace(ham, a, s, t, grid, h);
    c = &*local;
  }
  c->prepare(h);
  MatrixXcd table(2 * n, n);
  for (Index tau = 0; tau < 2 * n; ++tau)
    for (Index m = 0; m < n; ++m) table(tau, m) = c->value(tau, pg.point(0, m));

  out.transported = quantization::weyl_quantize_tables({table}, 1, grid, h);
  out.residual = quantization::operator_norm(out.conjugated.matrix - out.transported.matrix);
  return out;
}

Symbol hamiltonian_weyl_symbol(const std::string& name) {
  if (name == "free") return sym_polynomial({{0.5, 0, 2}});
  if (name == "harmonic") return sym_polynomial({{0.5, 2, 0}, {0.5, 0, 2}});
  if (name == "quartic")
    return sym_polynomial({{0.5, 0, 2}, {0.25, 4, 0}, {0.5, 2, 0}});
  throw std::invalid_argument("hamiltonian_weyl_symbol: unknown family " + name);
}

// ---------------------------------------------------------------------------
// measure pushforward and eigenfunction diagnostics
// ---------------------------------------------------------------------------

namespace {

double sliced_w1(const std::vector<VectorXd>& pts_a, const std::vector<double>& w_a,
                 const std::vector<VectorXd>& pts_b, const std::vector<double>& w_b) {
  const std::vector<std::pair<double, double>> dirs = {
      {1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}, {std::sqrt(0.5), -std::sqrt(0.5)}};
  if (pts_a.empty() || pts_b.empty()) return pts_a.empty() && pts_b.empty() ? 0.0 : 1e300;
  double total = 0.0;
  for (const auto& [cx, cp] : dirs) {
    std::vector<std::pair<double, double>> sa, sb;
    sa.reserve(pts_a.size());
    sb.reserve(pts_b.size());
    double ma = 0, mb = 0;
    for (size_t i = 0; i < pts_a.size(); ++i) {
      sa.push_back({cx * pts_a[i][0] + cp * pts_a[i][1], w_a[i]});
      ma += w_a[i];
    }
    for (size_t i = 0; i < pts_b.size(); ++i) {
      sb.push_back({cx * pts_b[i][0] + cp * pts_b[i][1], w_b[i]});
      mb += w_b[i];
    }
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    // W1 of the two normalized 1-D measures via CDF difference
    size_t ia = 0, ib = 0;
    double ca = 0, cb = 0, prev = std::min(sa.front().first, sb.front().first), acc = 0;
    while (ia < sa.size() || ib < sb.size()) {
      const double xa = ia < sa.size() ? sa[ia].first : 1e300;
      const double xb = ib < sb.size() ? sb[ib].first : 1e300;
      const double x = std::min(xa, xb);
      acc += std::abs(ca / ma - cb / mb) * (x - prev);
      prev = x;
      if (xa <= xb) ca += sa[ia++].second;
      else cb += sb[ib++].second;
    }
    total += acc;
  }
  return total / double(dirs.size());
}

}  // namespace

PushforwardResult measure_pushforward_check(const Hamiltonian& ham,
                                            const VectorXd& potential,
                                            const WaveField& psi0, double t, double dt) {
  const SplitStepPropagator prop(psi0.grid, psi0.h, potential, dt);
  const WaveField psit = prop.propagate(psi0, t);

  const PhaseSpaceField h0 = transforms::husimi(psi0);
  const PhaseSpaceField h1 = transforms::husimi(psit);

  const double cut0 = 1e-8 * h0.values.real().maxCoeff();
  std::vector<VectorXd> pts0;
  std::vector<double> w0;
  for (Index iq = 0; iq < h0.xgrid.size(); ++iq)
    for (Index ip = 0; ip < h0.xigrid.size(); ++ip) {
      const double w = std::real(h0.values[h0.flat(iq, ip)]);
      if (w < cut0) continue;
      VectorXd z(2);
      z << h0.xgrid.point(0, iq), h0.xigrid.point(0, ip);
      pts0.push_back(z);
      w0.push_back(w);
    }

  // transport the initial cloud
  std::vector<VectorXd> pts_t(pts0.size());
  parallel_for(Index(pts0.size()), [&](Index k) {
    VectorXd y0 = pts0[k];
    auto rhs = [&](double tt, const VectorXd& y, VectorXd& dy) {
      PhasePoint w{y.head(1), y.tail(1)};
      const VectorXd g = ham.gradient(tt, w);
      dy.resize(2);
      dy[0] = g[1];
      dy[1] = -g[0];
    };
    pts_t[k] = integrate_rk45(rhs, 0.0, t, y0, OdeOptions{.tol = 1e-10});
  });

  const double cut1 = 1e-8 * h1.values.real().maxCoeff();
  std::vector<VectorXd> pts1;
  std::vector<double> w1;
  double best = -1.0;
  VectorXd peak(2);
  for (Index iq = 0; iq < h1.xgrid.size(); ++iq)
    for (Index ip = 0; ip < h1.xigrid.size(); ++ip) {
      const double w = std::real(h1.values[h1.flat(iq, ip)]);
      if (w > best) {
        best = w;
        peak << h1.xgrid.point(0, iq), h1.xigrid.point(0, ip);
      }
      if (w < cut1) continue;
      VectorXd z(2);
      z << h1.xgrid.point(0, iq), h1.xigrid.point(0, ip);
      pts1.push_back(z);
      w1.push_back(w);
    }

  PushforwardResult out;
  out.discrepancy = sliced_w1(pts_t, w0, pts1, w1);
  out.husimi_peak = peak;
  return out;
}

EigenfunctionReport eigenfunction_diagnostics(const VectorXd& potential_values,
                                              const std::function<double(double)>& potential,
                                              const GridSpec& grid, double h, double energy,
                                              double delta, double window) {
  if (grid.dim() != 1)
    throw DimensionError("eigenfunction_diagnostics: 1-D grids only");
  if (potential_values.size() != grid.size())
    throw DimensionError("eigenfunction_diagnostics: potential size mismatch");

  // Op_h(xi^2 + V): spectral kinetic plus diagonal potential
  Symbol p;
  p.ncomp = 1;
  p.class_order = 2;
  p.max_derivative = 0;
  p.scalar = [potential](int ax, int axi, double x, double xi) -> Complex {
    if (ax == 0 && axi == 0) return xi * xi + potential(x);
    throw std::invalid_argument("eigenfunction potential symbol: derivatives unavailable");
  };
  const quantization::GridOperator H = quantization::weyl_quantize(p, grid, h);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (H.matrix + H.matrix.adjoint()));

  EigenfunctionReport rep;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lam = es.eigenvalues()[k];
    if (std::abs(lam - energy) > window) continue;
    WaveField phi(grid, h, es.eigenvectors().col(k));
    phi.normalize();
    const PhaseSpaceField hus = transforms::husimi(phi);
    double inside = 0.0, total = 0.0;
    const double fd = 1e-5;
    for (Index iq = 0; iq < hus.xgrid.size(); ++iq) {
      const double x = hus.xgrid.point(0, iq);
      const double vp = (potential(x + fd) - potential(x - fd)) / (2.0 * fd);
      for (Index ip = 0; ip < hus.xigrid.size(); ++ip) {
        const double xi = hus.xigrid.point(0, ip);
        const double w = std::real(hus.values[hus.flat(iq, ip)]);
        total += w;
        const double pval = xi * xi + potential(x);
        const double grad = std::sqrt(vp * vp + 4.0 * xi * xi);
        const double dist = std::abs(pval - energy) / std::max(grad, 1e-8);
        if (dist <= delta) inside += w;
      }
    }
    rep.eigenvalues.push_back(lam);
    rep.shell_fractions.push_back(total > 0 ? inside / total : 0.0);
  }
  return rep;
}

}  // namespace sclab::propagators
