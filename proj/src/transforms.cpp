#include "sclab/transforms.hpp"

#include "sclab/fft.hpp"

namespace sclab::transforms {

namespace {

VectorXd momentum_axis(const GridSpec& xgrid, double h, int axis) {
  const double dxi = 2.0 * kPi * h / xgrid.length(axis);
  const Index n = xgrid.count(axis);
  VectorXd xi(n);
  for (Index m = 0; m < n; ++m) xi[m] = dxi * double(m - n / 2);
  return xi;
}

}  // namespace

WaveField h_fourier(const WaveField& f, FourierDiagnostics* diag) {
  const GridSpec& g = f.grid;
  const int d = g.dim();
  VectorXcd data = f.samples;
  fft::forward_nd(data, g.counts());
  data = fft_to_natural_order(data, g.counts());

  const GridSpec pgrid = g.momentum_grid(f.h);
  const double pref = std::pow(2.0 * kPi * f.h, -0.5 * d) * g.cell_volume();
  // phase e^{-i a.xi/h} from the box offset
  const Index total = g.size();
  for (Index fl = 0; fl < total; ++fl) {
    const VectorXi idx = g.unflat(fl);
    double axi = 0.0;
    for (int a = 0; a < d; ++a) axi += g.lo()[a] * pgrid.point(a, idx[a]);
    data[fl] *= pref * std::exp(Complex(0.0, -axi / f.h));
  }

  WaveField out(pgrid, f.h, std::move(data));
  if (diag) {
    double top = 0.0, tot = 0.0;
    for (Index fl = 0; fl < total; ++fl) {
      const VectorXi idx = g.unflat(fl);
      const double m2 = std::norm(out.samples[fl]);
      tot += m2;
      for (int a = 0; a < d; ++a) {
        const Index n = g.count(a);
        const Index s = idx[a] - n / 2;
        if (std::abs(double(s)) >= double(n) / 4.0) {
          top += m2;
          break;
        }
      }
    }
    diag->top_octave_fraction = tot > 0 ? top / tot : 0.0;
    diag->aliasing_flag = diag->top_octave_fraction > 0.01;
  }
  return out;
}

WaveField h_fourier_inverse(const WaveField& mf, const GridSpec& xgrid) {
  const int d = xgrid.dim();
  if (!(mf.grid == xgrid.momentum_grid(mf.h)))
    throw DimensionError("h_fourier_inverse: momentum grid does not match the position grid");
  VectorXcd data = mf.samples;
  const Index total = xgrid.size();
  const double pref = std::pow(2.0 * kPi * mf.h, -0.5 * d) * mf.grid.cell_volume();
  for (Index fl = 0; fl < total; ++fl) {
    const VectorXi idx = xgrid.unflat(fl);
    double axi = 0.0;
    for (int a = 0; a < d; ++a) axi += xgrid.lo()[a] * mf.grid.point(a, idx[a]);
    data[fl] *= pref * std::exp(Complex(0.0, axi / mf.h));
  }
  data = natural_to_fft_order(data, xgrid.counts());
  fft::inverse_nd(data, xgrid.counts());
  return WaveField(xgrid, mf.h, std::move(data));
}

PhaseSpaceField wigner(const WaveField& f, const GridSpec& xi_grid, WignerDiagnostics* diag) {
  if (f.grid.dim() != 1)
    throw DimensionError("wigner: implemented for 1-D fields");
  const Index n = f.grid.count(0);
  const double L = f.grid.length(0);
  const double dx = f.grid.spacing(0);
  const double pref = dx / (kPi * f.h);

  // natural half-spaced xi-grid: spacing pi h / L
  const double dxi = kPi * f.h / L;
  GridSpec natural = GridSpec::line(-dxi * double(n / 2), dxi * double(n - n / 2), n);

  WignerDiagnostics local;
  {
    // mass outside the central half box; the v-integral wraps when the
    // field is not concentrated there
    double outer = 0.0, tot = 0.0;
    const double c = 0.5 * (f.grid.lo()[0] + f.grid.hi()[0]);
    for (Index i = 0; i < n; ++i) {
      const double m2 = std::norm(f.samples[i]);
      tot += m2;
      if (std::abs(f.grid.point(0, i) - c) > 0.25 * L) outer += m2;
    }
    local.wrap_mass = tot > 0 ? outer / tot : 0.0;
    local.truncation_flag = local.wrap_mass > 1e-8;
  }

  const bool use_natural = (xi_grid.dim() == 0) || (xi_grid == natural);
  PhaseSpaceField W;
  W.xgrid = f.grid;
  W.xigrid = use_natural ? natural : xi_grid;
  W.h = f.h;
  W.values.resize(n * W.xigrid.size());

  // The u-sum is windowed to |u| < L/4: each correlation lag is then counted
  // once and the pairing cannot reconnect through the torus (which would
  // place a ghost copy at the antipodal x). Exact for fields concentrated
  // in the central half of the box.
  auto lag_allowed = [n](Index j) {
    const Index js = j <= n / 2 ? j : j - n;
    return std::abs(js) < n / 4;
  };
  if (use_natural) {
    VectorXcd corr(n), row(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (!lag_allowed(j)) {
          corr[j] = 0.0;
          continue;
        }
        const Index lo = ((i - j) % n + n) % n;
        const Index hi = (i + j) % n;
        corr[j] = f.samples[lo] * std::conj(f.samples[hi]);
      }
      row = corr;
      fft::inverse(row);  // sum_j corr_j e^{+2 pi i j m / n}
      row = fft_to_natural_order(row, f.grid.counts());
      for (Index m = 0; m < n; ++m) {
        local.max_imag = std::max(local.max_imag, std::abs(std::imag(row[m])) * pref);
        W.values[W.flat(i, m)] = pref * std::real(row[m]);
      }
    }
  } else {
    // direct evaluation at arbitrary xi values
    for (Index i = 0; i < n; ++i) {
      for (Index m = 0; m < W.xigrid.size(); ++m) {
        const double xi = W.xigrid.point(0, m);
        Complex acc = 0.0;
        for (Index j = 0; j < n; ++j) {
          if (!lag_allowed(j)) continue;
          const Index lo = ((i - j) % n + n) % n;
          const Index hi = (i + j) % n;
          const double u = dx * double(j <= n / 2 ? j : j - n);
          acc += f.samples[lo] * std::conj(f.samples[hi]) *
                 std::exp(Complex(0.0, 2.0 * u * xi / f.h));
        }
        local.max_imag = std::max(local.max_imag, std::abs(std::imag(acc)) * pref);
        W.values[W.flat(i, m)] = pref * std::real(acc);
      }
    }
  }
  if (diag) *diag = local;
  return W;
}

VectorXd marginal_x(const PhaseSpaceField& w) {
  const Index nx = w.xgrid.size(), nxi = w.xigrid.size();
  VectorXd out = VectorXd::Zero(nx);
  for (Index m = 0; m < nxi; ++m)
    for (Index i = 0; i < nx; ++i) out[i] += std::real(w.values[w.flat(i, m)]);
  return out * w.xigrid.cell_volume();
}

VectorXd marginal_xi(const PhaseSpaceField& w) {
  const Index nx = w.xgrid.size(), nxi = w.xigrid.size();
  VectorXd out = VectorXd::Zero(nxi);
  for (Index m = 0; m < nxi; ++m)
    for (Index i = 0; i < nx; ++i) out[m] += std::real(w.values[w.flat(i, m)]);
  return out * w.xgrid.cell_volume();
}

namespace {

// support interval [lo, hi] where the density exceeds tol * max
void density_support(const VectorXd& dens, const GridSpec& g, double tol, double& lo,
                     double& hi) {
  const double peak = dens.maxCoeff();
  lo = g.hi()[0];
  hi = g.lo()[0];
  for (Index i = 0; i < dens.size(); ++i) {
    if (dens[i] > tol * peak) {
      lo = std::min(lo, g.point(0, i));
      hi = std::max(hi, g.point(0, i));
    }
  }
  if (lo > hi) {
    lo = g.lo()[0];
    hi = g.hi()[0];
  }
}

Index next_pow2(double x) {
  Index n = 8;
  while (double(n) < x) n *= 2;
  return n;
}

}  // namespace

PhaseSpaceField bargmann_on(const WaveField& f, const GridSpec& qgrid, const GridSpec& pgrid,
                            BargmannDiagnostics* diag) {
  if (f.grid.dim() != 1) throw DimensionError("bargmann: implemented for 1-D fields");
  const double h = f.h;
  const Index n = f.grid.count(0);
  const double dx = f.grid.spacing(0);
  const double win_pref = std::pow(kPi * h, -0.25);
  const double pref = std::pow(2.0 * kPi * h, -0.5) * dx;

  PhaseSpaceField B;
  B.xgrid = qgrid;
  B.xigrid = pgrid;
  B.h = h;
  B.values.resize(qgrid.size() * pgrid.size());

  // <f, g_z> = e^{i p q / h} sum_x f(x) w(x - q) e^{-i p x / h} dx,
  // w = (pi h)^{-1/4} exp(-(x-q)^2 / 2h)
  parallel_for(qgrid.size(), [&](Index a) {
    const double q = qgrid.point(0, a);
    for (Index k = 0; k < pgrid.size(); ++k) {
      const double p = pgrid.point(0, k);
      Complex acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double x = f.grid.point(0, i);
        const double u = x - q;
        if (std::abs(u) > 14.0 * std::sqrt(h)) continue;  // window tail below 1e-21
        acc += f.samples[i] * win_pref * std::exp(-u * u / (2.0 * h)) *
               std::exp(Complex(0.0, -p * u / h));
      }
      B.values[B.flat(a, k)] = pref * acc;
    }
  });

  if (diag) {
    const double captured = B.abs2_mass();
    const double total = f.norm_sq();
    diag->mass_deficit = total > 0 ? 1.0 - captured / total : 0.0;
    diag->coverage_flag = diag->mass_deficit > 1e-3;
  }
  return B;
}

PhaseSpaceField bargmann(const WaveField& f, const BargmannOptions& opts,
                         BargmannDiagnostics* diag) {
  if (f.grid.dim() != 1) throw DimensionError("bargmann: implemented for 1-D fields");
  const double h = f.h;
  const double rh = std::sqrt(h);

  // covered region: position/momentum support inflated by margin*sqrt(h)
  VectorXd xd(f.grid.size());
  for (Index i = 0; i < xd.size(); ++i) xd[i] = std::norm(f.samples[i]);
  double qlo, qhi;
  density_support(xd, f.grid, opts.coverage_tol, qlo, qhi);
  qlo -= opts.margin_sqrt_h * rh;
  qhi += opts.margin_sqrt_h * rh;

  const WaveField mf = h_fourier(f);
  VectorXd pd(mf.grid.size());
  for (Index i = 0; i < pd.size(); ++i) pd[i] = std::norm(mf.samples[i]);
  double plo, phi;
  density_support(pd, mf.grid, opts.coverage_tol, plo, phi);
  plo -= opts.margin_sqrt_h * rh;
  phi += opts.margin_sqrt_h * rh;

  const double dz = opts.max_spacing_sqrt_h * rh;
  const GridSpec qgrid = GridSpec::line(qlo, qhi, next_pow2((qhi - qlo) / dz));
  const GridSpec pgrid = GridSpec::line(plo, phi, next_pow2((phi - plo) / dz));
  return bargmann_on(f, qgrid, pgrid, diag);
}

WaveField bargmann_synthesis(const PhaseSpaceField& B, const GridSpec& xgrid) {
  const double h = B.h;
  const double pref = std::pow(2.0 * kPi * h, -0.5) * B.cell_volume();
  const double gauss_pref = std::pow(kPi * h, -0.25);
  WaveField out(xgrid, h);
  const Index n = xgrid.size();
  parallel_for(n, [&](Index i) {
    const double x = xgrid.point(0, i);
    Complex acc = 0.0;
    for (Index a = 0; a < B.xgrid.size(); ++a) {
      const double q = B.xgrid.point(0, a);
      const double u = x - q;
      if (std::abs(u) > 14.0 * std::sqrt(h)) continue;
      const double win = gauss_pref * std::exp(-u * u / (2.0 * h));
      for (Index k = 0; k < B.xigrid.size(); ++k) {
        const double p = B.xigrid.point(0, k);
        acc += B.values[B.flat(a, k)] * win * std::exp(Complex(0.0, p * u / h));
      }
    }
    out.samples[i] = pref * acc;
  });
  return out;
}

PhaseSpaceField husimi(const WaveField& f, const BargmannOptions& opts) {
  PhaseSpaceField B = bargmann(f, opts);
  for (Index i = 0; i < B.values.size(); ++i) B.values[i] = std::norm(B.values[i]);
  return B;
}

Moments moments(const WaveField& f, double norm_tol) {
  if (std::abs(f.norm() - 1.0) > norm_tol)
    throw std::invalid_argument("moments: field is not normalized");
  const int d = f.grid.dim();
  Moments out;
  out.mean_x.resize(d);
  out.mean_xi.resize(d);
  out.dev_x.resize(d);
  out.dev_xi.resize(d);

  const WaveField mf = h_fourier(f);
  for (int a = 0; a < d; ++a) {
    double m1 = 0.0, m2 = 0.0, p1 = 0.0, p2 = 0.0;
    for (Index fl = 0; fl < f.grid.size(); ++fl) {
      const VectorXi idx = f.grid.unflat(fl);
      const double x = f.grid.point(a, idx[a]);
      const double w = std::norm(f.samples[fl]);
      m1 += x * w;
      m2 += x * x * w;
    }
    for (Index fl = 0; fl < mf.grid.size(); ++fl) {
      const VectorXi idx = mf.grid.unflat(fl);
      const double xi = mf.grid.point(a, idx[a]);
      const double w = std::norm(mf.samples[fl]);
      p1 += xi * w;
      p2 += xi * xi * w;
    }
    m1 *= f.grid.cell_volume();
    m2 *= f.grid.cell_volume();
    p1 *= mf.grid.cell_volume();
    p2 *= mf.grid.cell_volume();
    out.mean_x[a] = m1;
    out.mean_xi[a] = p1;
    out.dev_x[a] = std::sqrt(std::max(0.0, m2 - m1 * m1));
    out.dev_xi[a] = std::sqrt(std::max(0.0, p2 - p1 * p1));
  }
  return out;
}

double h_oscillation_tail(const WaveField& f, double R) {
  const WaveField mf = h_fourier(f);
  double tail = 0.0;
  for (Index fl = 0; fl < mf.grid.size(); ++fl) {
    const VectorXi idx = mf.grid.unflat(fl);
    double r2 = 0.0;
    for (int a = 0; a < mf.grid.dim(); ++a) {
      const double xi = mf.grid.point(a, idx[a]);
      r2 += xi * xi;
    }
    if (std::sqrt(r2) >= R) tail += std::norm(mf.samples[fl]);
  }
  return tail * mf.grid.cell_volume();
}

double sobolev_norm(const WaveField& f, double s) {
  if (s < 0) throw std::invalid_argument("sobolev_norm: need s >= 0");
  const WaveField mf = h_fourier(f);
  std::vector<double> ladder;
  for (int l = 0; l <= int(std::floor(s)); ++l) ladder.push_back(double(l));
  if (ladder.empty() || ladder.back() != s) ladder.push_back(s);

  double best = 0.0;
  for (double l : ladder) {
    double acc = 0.0;
    for (Index fl = 0; fl < mf.grid.size(); ++fl) {
      const VectorXi idx = mf.grid.unflat(fl);
      double r2 = 0.0;
      for (int a = 0; a < mf.grid.dim(); ++a) {
        const double xi = mf.grid.point(a, idx[a]);
        r2 += xi * xi;
      }
      acc += std::pow(1.0 + r2, l) * std::norm(mf.samples[fl]);
    }
    best = std::max(best, std::sqrt(acc * mf.grid.cell_volume()));
  }
  return best;
}

}  // namespace sclab::transforms
