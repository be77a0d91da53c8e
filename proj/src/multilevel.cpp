#include "sclab/multilevel.hpp"

#include "sclab/fft.hpp"
#include "sclab/propagators.hpp"
#include "sclab/wavepackets.hpp"

#include <Eigen/Eigenvalues>

#include <deque>

namespace sclab::multilevel {

Eigen::Matrix2d MatrixPotential::value(const VectorXd& x) const {
  const Eigen::Vector2d wv = w(x);
  Eigen::Matrix2d V;
  V << wv[0], wv[1], wv[1], -wv[0];
  return V;
}

MatrixPotential MatrixPotential::conical_linear() {
  MatrixPotential vp;
  vp.xdim = 2;
  vp.w = [](const VectorXd& x) { return Eigen::Vector2d(x[0], x[1]); };
  vp.dw = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
  return vp;
}

MatrixPotential MatrixPotential::gapped_1d(double base, double amp, double amp2) {
  MatrixPotential vp;
  vp.xdim = 1;
  vp.w = [=](const VectorXd& x) {
    const double e = std::exp(-x[0] * x[0]);
    return Eigen::Vector2d(base + amp * e, amp2 * x[0] * e);
  };
  vp.dw = [=](const VectorXd& x) {
    const double e = std::exp(-x[0] * x[0]);
    MatrixXd d(2, 1);
    d(0, 0) = -2.0 * x[0] * amp * e;
    d(1, 0) = amp2 * (1.0 - 2.0 * x[0] * x[0]) * e;
    return d;
  };
  return vp;
}

EigenStructure eigen_structure(const MatrixPotential& vp, const VectorXd& x) {
  const Eigen::Vector2d wv = vp.w(x);
  const double r = wv.norm();
  if (r <= vp.gap_floor)
    throw std::runtime_error("eigen_structure: crossing proximity, |w| below gap_floor");
  const Eigen::Matrix2d V = vp.value(x);
  EigenStructure es;
  es.lambda_plus = r;
  es.lambda_minus = -r;
  es.proj_plus = 0.5 * (Eigen::Matrix2d::Identity() + V / r);
  es.proj_minus = 0.5 * (Eigen::Matrix2d::Identity() - V / r);
  return es;
}

Hamiltonian band_hamiltonian(const MatrixPotential& vp, int band) {
  if (band != 1 && band != -1) throw std::invalid_argument("band must be +1 or -1");
  const double sgn = double(band);
  const int d = vp.xdim;
  Hamiltonian h;
  h.name = band == 1 ? "band+" : "band-";
  h.value = [vp, sgn](double, const PhasePoint& z) {
    return 0.5 * z.p.squaredNorm() + sgn * vp.w(z.q).norm();
  };
  h.gradient = [vp, sgn, d](double, const PhasePoint& z) {
    const Eigen::Vector2d wv = vp.w(z.q);
    const MatrixXd dwv = vp.dw(z.q);
    const double r = std::max(wv.norm(), 1e-300);
    VectorXd g(2 * d);
    g.head(d) = sgn * (dwv.transpose() * wv) / r;
    g.tail(d) = z.p;
    return g;
  };
  // Hessian of |w| by central differences of the gradient; only the
  // variational equation uses it.
  h.hessian = [vp, sgn, d](double t, const PhasePoint& z) {
    MatrixXd H = MatrixXd::Zero(2 * d, 2 * d);
    H.bottomRightCorner(d, d) = MatrixXd::Identity(d, d);
    const double step = 1e-5;
    for (int j = 0; j < d; ++j) {
      VectorXd qp = z.q, qm = z.q;
      qp[j] += step;
      qm[j] -= step;
      const Eigen::Vector2d wp = vp.w(qp), wm = vp.w(qm);
      const VectorXd gp = sgn * (vp.dw(qp).transpose() * wp) / std::max(wp.norm(), 1e-300);
      const VectorXd gm = sgn * (vp.dw(qm).transpose() * wm) / std::max(wm.norm(), 1e-300);
      H.block(0, j, d, 1) = (gp - gm) / (2.0 * step);
    }
    H.topLeftCorner(d, d) = 0.5 * (H.topLeftCorner(d, d) +
                                   H.topLeftCorner(d, d).transpose().eval());
    return H;
  };
  return h;
}

namespace {

/// x-derivatives of the eigenprojector: dPi_j = 0.5 d_j(V/|w|).
Eigen::Matrix2d proj_derivative(const MatrixPotential& vp, const VectorXd& x, int j) {
  const Eigen::Vector2d wv = vp.w(x);
  const MatrixXd dwv = vp.dw(x);
  const double r = wv.norm();
  Eigen::Matrix2d Vj;
  Vj << dwv(0, j), dwv(1, j), dwv(1, j), -dwv(0, j);
  Eigen::Matrix2d V;
  V << wv[0], wv[1], wv[1], -wv[0];
  const double wdw = wv.dot(dwv.col(j));
  return 0.5 * (Vj / r - V * (wdw / (r * r * r)));
}

/// F(x, xi) = [xi . grad Pi, Pi] (band independent).
Eigen::Matrix2d transport_generator(const MatrixPotential& vp, const VectorXd& x,
                                    const VectorXd& xi) {
  const Eigen::Vector2d wv = vp.w(x);
  const double r = wv.norm();
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  for (int j = 0; j < vp.xdim; ++j) M += xi[j] * proj_derivative(vp, x, j);
  Eigen::Matrix2d V;
  V << wv[0], wv[1], wv[1], -wv[0];
  const Eigen::Matrix2d Pi = 0.5 * (Eigen::Matrix2d::Identity() + V / r);
  return M * Pi - Pi * M;
}

}  // namespace

TransportFrame parallel_transport(const MatrixPotential& vp, int band, const PhasePoint& z0,
                                  double t, double ode_tol) {
  const int d = vp.xdim;
  VectorXd y0(2 * d + 4);
  y0.head(d) = z0.q;
  y0.segment(d, d) = z0.p;
  y0.segment(2 * d, 4) << 1.0, 0.0, 0.0, 1.0;  // R row-major

  const Hamiltonian ham = band_hamiltonian(vp, band);
  const double sgn = double(band);
  auto rhs = [&](double tt, const VectorXd& y, VectorXd& dy) {
    const VectorXd x = y.head(d);
    const VectorXd xi = y.segment(d, d);
    const Eigen::Vector2d wv = vp.w(x);
    const double r = std::max(wv.norm(), 1e-300);
    if (wv.norm() < vp.gap_floor)
      throw IntegrationFailure("parallel_transport: gap violation along the path", tt);
    dy.resize(2 * d + 4);
    dy.head(d) = xi;
    dy.segment(d, d) = -sgn * (vp.dw(x).transpose() * wv) / r;
    Eigen::Matrix2d R;
    R << y[2 * d], y[2 * d + 1], y[2 * d + 2], y[2 * d + 3];
    const Eigen::Matrix2d dR = transport_generator(vp, x, xi) * R;
    dy[2 * d] = dR(0, 0);
    dy[2 * d + 1] = dR(0, 1);
    dy[2 * d + 2] = dR(1, 0);
    dy[2 * d + 3] = dR(1, 1);
  };
  const VectorXd yt = integrate_rk45(rhs, 0.0, t, y0, OdeOptions{.tol = ode_tol});
  TransportFrame out;
  out.R << yt[2 * d], yt[2 * d + 1], yt[2 * d + 2], yt[2 * d + 3];
  out.time = t;
  return out;
}

double lz_rate(const MatrixPotential& vp, const PhasePoint& z, double h) {
  const Eigen::Vector2d wv = vp.w(z.q);
  const Eigen::Vector2d dwxi = vp.dw(z.q) * z.p;
  const double denom = dwxi.norm();
  if (denom == 0.0)
    throw std::runtime_error("lz_rate: dw(x) xi = 0, transition rate undefined");
  return std::exp(-kPi * wv.squaredNorm() / (h * denom));
}

namespace {

struct BranchTask {
  HopState state;
  double t_start;
  int hops = 0;
};

}  // namespace

HopEnsemble hopping_simulate(const MatrixPotential& vp, const HopEnsemble& initial,
                             double t_final, double h, const HoppingOptions& opts) {
  const int d = vp.xdim;
  CounterRng rng(opts.seed);

  std::vector<HopEnsemble> per_initial(initial.size());

  parallel_for(Index(initial.size()), [&](Index init_idx) {
    std::deque<BranchTask> work;
    work.push_back({initial[init_idx], 0.0, 0});
    HopEnsemble done;
    int branches = 1;

    while (!work.empty()) {
      BranchTask task = work.front();
      work.pop_front();

      HopState cur = task.state;
      double t_cur = task.t_start;
      int hops = task.hops;

      while (t_cur < t_final) {
        const double sgn = double(cur.band);
        // augmented state: (x, xi, S)
        VectorXd y0(2 * d + 1);
        y0.head(d) = cur.z.q;
        y0.segment(d, d) = cur.z.p;
        y0[2 * d] = cur.phase;

        auto rhs = [&](double, const VectorXd& y, VectorXd& dy) {
          const VectorXd x = y.head(d);
          const VectorXd xi = y.segment(d, d);
          const Eigen::Vector2d wv = vp.w(x);
          const double r = std::max(wv.norm(), 1e-300);
          dy.resize(2 * d + 1);
          dy.head(d) = xi;
          dy.segment(d, d) = -sgn * (vp.dw(x).transpose() * wv) / r;
          // action density xi.xdot - p = |xi|^2/2 - sgn |w|
          dy[2 * d] = 0.5 * xi.squaredNorm() - sgn * r;
        };
        auto sigma = [&](const VectorXd& y) {
          const VectorXd x = y.head(d);
          const VectorXd xi = y.segment(d, d);
          return vp.w(x).dot(vp.dw(x) * xi);
        };

        // integrate until the hopping surface is crossed or t_final reached
        double t_prev = t_cur, t_stop = t_final;
        VectorXd y_prev = y0, y_stop;
        bool crossed = false, first = true;
        double sig_prev = 0.0;
        OdeObserver obs = [&](double tt, const VectorXd& y) {
          const double sig = sigma(y);
          if (first) {
            first = false;
            sig_prev = sig;
            t_prev = tt;
            y_prev = y;
            return true;
          }
          if (sig_prev != 0.0 && sig != 0.0 && std::signbit(sig) != std::signbit(sig_prev)) {
            crossed = true;
            t_stop = tt;
            y_stop = y;
            return false;
          }
          sig_prev = sig;
          t_prev = tt;
          y_prev = y;
          return true;
        };
        VectorXd y_end =
            integrate_rk45(rhs, t_cur, t_final, y0, OdeOptions{.tol = opts.ode_tol}, obs);

        if (!crossed) {
          cur.z.q = y_end.head(d);
          cur.z.p = y_end.segment(d, d);
          cur.phase = y_end[2 * d];
          t_cur = t_final;
          break;
        }

        // bisect the bracket [t_prev, t_stop] to the crossing time
        double ta = t_prev, tb = t_stop;
        VectorXd ya = y_prev, yb = y_stop;
        double sa = sigma(ya);
        for (int it = 0; it < 60 && (tb - ta) > 1e-13 * std::max(1.0, std::abs(tb)); ++it) {
          const double tm = 0.5 * (ta + tb);
          const VectorXd ym =
              integrate_rk45(rhs, ta, tm, ya, OdeOptions{.tol = opts.ode_tol});
          const double sm = sigma(ym);
          if (sm == 0.0 || std::signbit(sm) == std::signbit(sa)) {
            ta = tm;
            ya = ym;
            sa = sm;
          } else {
            tb = tm;
            yb = ym;
          }
        }
        const double t_hop = tb;
        const VectorXd y_hop = yb;

        HopState at_hop;
        at_hop.z.q = y_hop.head(d);
        at_hop.z.p = y_hop.segment(d, d);
        at_hop.phase = y_hop[2 * d];
        at_hop.band = cur.band;
        at_hop.weight = cur.weight;

        const Eigen::Vector2d dwxi = vp.dw(at_hop.z.q) * at_hop.z.p;
        if (dwxi.norm() < 1e-12)
          throw std::runtime_error(
              "hopping_simulate: tangential passage through the crossing set");
        const double T = lz_rate(vp, at_hop.z, h);

        if (opts.mode == HoppingMode::splitting) {
          const double w_switch = at_hop.weight * T;
          if (w_switch >= opts.prune_weight && branches < opts.max_branches) {
            BranchTask child;
            child.state = at_hop;
            child.state.band = -at_hop.band;
            child.state.weight = w_switch;
            child.t_start = t_hop;
            child.hops = hops + 1;
            work.push_back(child);
            ++branches;
            cur = at_hop;
            cur.weight = at_hop.weight * (1.0 - T);
          } else {
            cur = at_hop;  // keep full weight, no split below threshold
          }
        } else {
          const double u = rng.uniform((std::uint64_t(init_idx) << 20) + std::uint64_t(hops));
          cur = at_hop;
          if (u < T) cur.band = -cur.band;
        }
        ++hops;
        t_cur = t_hop;
      }

      done.push_back(cur);
    }
    per_initial[init_idx] = std::move(done);
  });

  HopEnsemble out;
  for (auto& part : per_initial)
    for (auto& s : part) out.push_back(std::move(s));
  return out;
}

double hopping_observable(const HopEnsemble& ensemble,
                          const std::function<double(const PhasePoint&, int)>& a) {
  double acc = 0.0;
  for (const auto& s : ensemble) acc += s.weight * a(s.z, s.band);
  return acc;
}

// ---------------------------------------------------------------------------
// two-level grid propagator
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
      const Index s = bin <= n / 2 ? bin : bin - n;
      const double xi = 2.0 * kPi * h / grid.length(a) * double(s);
      acc += 0.5 * xi * xi;
    }
    k[f] = acc;
  }
  return k;
}

}  // namespace

TwoLevelPropagator::TwoLevelPropagator(const MatrixPotential& vp, GridSpec grid, double h,
                                       double dt)
    : vp_(&vp), grid_(std::move(grid)), h_(h), dt_(dt) {
  const double cap = propagators::SplitStepPropagator::max_step(grid_, h_);
  if (dt_ > cap)
    throw std::invalid_argument("TwoLevelPropagator: dt exceeds the band-edge phase budget");
  kinetic_ = kinetic_fft_order(grid_, h_);
  wvals_.resize(grid_.size());
  VectorXd x(grid_.dim());
  for (Index f = 0; f < grid_.size(); ++f) {
    const VectorXi idx = grid_.unflat(f);
    for (int a = 0; a < grid_.dim(); ++a) x[a] = grid_.point(a, idx[a]);
    wvals_[f] = vp.w(x);
  }
}

VectorXcd TwoLevelPropagator::propagate(const VectorXcd& spinor, double t) const {
  const Index n = grid_.size();
  if (spinor.size() != 2 * n) throw DimensionError("TwoLevelPropagator: spinor size");
  if (t == 0.0) return spinor;
  const long steps = std::max<long>(1, std::lround(t / dt_));
  const double dt = t / double(steps);

  VectorXcd a = spinor.head(n), b = spinor.tail(n);

  auto apply_potential = [&](double tau) {
    // exp(-i tau V / h) = cos(tau |w|/h) Id - i sin(tau |w|/h) V/|w|
    for (Index f = 0; f < n; ++f) {
      const Eigen::Vector2d wv = wvals_[f];
      const double r = wv.norm();
      const double phi = tau * r / h_;
      const double c = std::cos(phi);
      const Complex s = r > 1e-300 ? Complex(0.0, -std::sin(phi) / r) : Complex(0.0, 0.0);
      const Complex na = (c + s * wv[0]) * a[f] + s * wv[1] * b[f];
      const Complex nb = s * wv[1] * a[f] + (c - s * wv[0]) * b[f];
      a[f] = na;
      b[f] = nb;
    }
  };
  auto apply_kinetic = [&](double tau) {
    const double inv_n = 1.0 / double(n);
    for (VectorXcd* c : {&a, &b}) {
      fft::forward_nd(*c, grid_.counts());
      for (Index f = 0; f < n; ++f)
        (*c)[f] *= std::exp(Complex(0.0, -tau * kinetic_[f] / h_));
      fft::inverse_nd(*c, grid_.counts());
      *c *= inv_n;
    }
  };

  apply_potential(0.5 * dt);
  for (long s = 0; s < steps; ++s) {
    apply_kinetic(dt);
    apply_potential(s + 1 < steps ? dt : 0.5 * dt);
  }
  VectorXcd out(2 * n);
  out.head(n) = a;
  out.tail(n) = b;
  return out;
}

Eigen::Vector2d TwoLevelPropagator::band_populations(const VectorXcd& spinor) const {
  const Index n = grid_.size();
  const double dV = grid_.cell_volume();
  double plus = 0.0, minus = 0.0;
  for (Index f = 0; f < n; ++f) {
    const Complex va = spinor[f], vb = spinor[n + f];
    const double dens = std::norm(va) + std::norm(vb);
    const Eigen::Vector2d wv = wvals_[f];
    const double r = wv.norm();
    double cross = 0.0;
    if (r > 1e-12) {
      // psi^dag (V/|w|) psi
      const Complex t = std::conj(va) * (wv[0] * va + wv[1] * vb) +
                        std::conj(vb) * (wv[1] * va - wv[0] * vb);
      cross = std::real(t) / r;
    }
    plus += 0.5 * (dens + cross);
    minus += 0.5 * (dens - cross);
  }
  return Eigen::Vector2d(plus * dV, minus * dV);
}

VectorXcd band_packet_spinor(const MatrixPotential& vp, const GridSpec& grid, double h,
                             const PhasePoint& center, int band) {
  using wavepackets::GaussianPacket;
  const GaussianPacket pkt = GaussianPacket::standard(center, h);
  const WaveField g = wavepackets::render(pkt, grid);
  const Index n = grid.size();
  VectorXcd spinor(2 * n);
  VectorXd x(grid.dim());
  for (Index f = 0; f < n; ++f) {
    const VectorXi idx = grid.unflat(f);
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.point(a, idx[a]);
    const Eigen::Vector2d wv = vp.w(x);
    const double r = wv.norm();
    Eigen::Vector2d v;
    if (band == 1)
      v << r + wv[0], wv[1];
    else
      v << -wv[1], r + wv[0];
    const double nv = v.norm();
    if (nv < 1e-14) {
      // on the branch-cut ray; fall back to the diabatic basis vector
      v = band == 1 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    } else {
      v /= nv;
    }
    spinor[f] = g.samples[f] * v[0];
    spinor[n + f] = g.samples[f] * v[1];
  }
  return spinor;
}

// ---------------------------------------------------------------------------
// adiabatic observable test
// ---------------------------------------------------------------------------

AdiabaticBenchmark::AdiabaticBenchmark(MatrixPotential vp, Symbol a_scalar, int band,
                                       double t_window, int nodes, GridSpec grid,
                                       double h_finest)
    : vp_(std::move(vp)), a_scalar_(std::move(a_scalar)), band_(band), t_window_(t_window),
      nodes_(nodes), grid_(std::move(grid)) {
  if (vp_.xdim != 1) throw DimensionError("AdiabaticBenchmark: 1-D position space");
  if (grid_.dim() != 1) throw DimensionError("AdiabaticBenchmark: 1-D grid");
  band_ham_ = band_hamiltonian(vp_, band_);

  const Index n = grid_.count(0);
  proj_.resize(2 * n);
  for (Index tau = 0; tau < 2 * n; ++tau) {
    VectorXd x(1);
    x[0] = grid_.lo()[0] + 0.5 * grid_.spacing(0) * double(tau);
    const EigenStructure es = eigen_structure(vp_, x);
    proj_[tau] = band_ == 1 ? es.proj_plus : es.proj_minus;
  }
  const double dt = t_window_ / double(nodes_);
  for (int k = 0; k < nodes_; ++k) {
    const double t = (double(k) + 0.5) * dt;
    caches_.push_back(std::make_unique<propagators::SymbolTransportCache>(
        band_ham_, a_scalar_, 0.0, t, grid_, h_finest));
  }
}

AdiabaticBenchmark::~AdiabaticBenchmark() = default;

AdiabaticResult AdiabaticBenchmark::residual(double h) {
  const Index n = grid_.count(0);
  const GridSpec pg = grid_.momentum_grid(h);

  // P = Op(xi^2/2 Id + V(x)) assembled from exact tables
  std::vector<MatrixXcd> pblocks(4, MatrixXcd(2 * n, n));
  for (Index tau = 0; tau < 2 * n; ++tau) {
    VectorXd x(1);
    x[0] = grid_.lo()[0] + 0.5 * grid_.spacing(0) * double(tau);
    const Eigen::Vector2d wv = vp_.w(x);
    for (Index m = 0; m < n; ++m) {
      const double xi = pg.point(0, m);
      const double kin = 0.5 * xi * xi;
      pblocks[0](tau, m) = kin + wv[0];
      pblocks[1](tau, m) = wv[1];
      pblocks[2](tau, m) = wv[1];
      pblocks[3](tau, m) = kin - wv[0];
    }
  }
  const quantization::GridOperator P =
      quantization::weyl_quantize_tables(pblocks, 2, grid_, h);
  const propagators::EigenPropagator U(P);
  const MatrixXcd& V = U.eigenvectors();
  const VectorXd& E = U.eigenvalues();

  auto sandwich_tables = [&](const std::function<double(Index, Index)>& scal) {
    std::vector<MatrixXcd> blocks(4, MatrixXcd(2 * n, n));
    for (Index tau = 0; tau < 2 * n; ++tau)
      for (Index m = 0; m < n; ++m) {
        const double c = scal(tau, m);
        blocks[0](tau, m) = c * proj_[tau](0, 0);
        blocks[1](tau, m) = c * proj_[tau](0, 1);
        blocks[2](tau, m) = c * proj_[tau](1, 0);
        blocks[3](tau, m) = c * proj_[tau](1, 1);
      }
    return quantization::weyl_quantize_tables(blocks, 2, grid_, h);
  };

  const quantization::GridOperator A = sandwich_tables([&](Index tau, Index m) {
    const double x = grid_.lo()[0] + 0.5 * grid_.spacing(0) * double(tau);
    return std::real(a_scalar_.value(x, pg.point(0, m)));
  });

  // all products in the eigenbasis of P: the conjugation is then diagonal
  const MatrixXcd A_eig = V.adjoint() * A.matrix * V;
  MatrixXcd acc = MatrixXcd::Zero(2 * n, 2 * n);
  const double dt = t_window_ / double(nodes_);
  for (int k = 0; k < nodes_; ++k) {
    const double t = (double(k) + 0.5) * dt;
    const double theta = (1.0 - std::cos(2.0 * kPi * t / t_window_)) / t_window_;

    auto& cache = *caches_[k];
    cache.prepare(h);
    const quantization::GridOperator B = sandwich_tables(
        [&](Index tau, Index m) { return cache.value(tau, pg.point(0, m)); });
    const MatrixXcd B_eig = V.adjoint() * B.matrix * V;

    MatrixXcd term = A_eig;
    for (Index r = 0; r < term.rows(); ++r)
      for (Index c = 0; c < term.cols(); ++c)
        term(r, c) *= std::exp(Complex(0.0, (E[r] - E[c]) * t / h));
    acc += (theta * dt) * (term - B_eig);
  }

  AdiabaticResult out;
  out.residual = quantization::operator_norm(acc);
  out.time_nodes = nodes_;
  return out;
}

AdiabaticResult adiabatic_egorov_check(const MatrixPotential& vp, const Symbol& a_scalar,
                                       int band, double t_window, int nodes,
                                       const GridSpec& grid, double h) {
  AdiabaticBenchmark bench(vp, a_scalar, band, t_window, nodes, grid, h);
  return bench.residual(h);
}

}  // namespace sclab::multilevel
