#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sclab/transforms.hpp"
#include "sclab/wavepackets.hpp"

using namespace sclab;
using namespace sclab::transforms;

namespace {

WaveField packet_field(double q, double p, double h, const GridSpec& g) {
  using wavepackets::GaussianPacket;
  PhasePoint z;
  z.q = VectorXd::Constant(1, q);
  z.p = VectorXd::Constant(1, p);
  return wavepackets::render(GaussianPacket::standard(z, h), g);
}

WaveField random_smooth_field(const GridSpec& g, double h, std::uint64_t seed) {
  CounterRng rng(seed);
  const Index n = g.count(0);
  const double c = 0.5 * (g.lo()[0] + g.hi()[0]);
  WaveField f(g, h);
  for (int mode = -6; mode <= 6; ++mode) {
    const Complex amp(rng.normal(100 + 2 * (mode + 6)), rng.normal(101 + 2 * (mode + 6)));
    for (Index i = 0; i < n; ++i) {
      const double x = g.point(0, i);
      f.samples[i] += amp * std::exp(Complex(0.0, 2.0 * kPi * mode * (x - c) / g.length(0)));
    }
  }
  for (Index i = 0; i < n; ++i) {
    const double u = (g.point(0, i) - c) / (g.length(0) / 7.0);
    f.samples[i] *= std::exp(-u * u);
  }
  f.normalize();
  return f;
}

}  // namespace

TEST_CASE("h_fourier: Plancherel and round trip") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 256);
  const double h = 1.0 / 32;
  const WaveField f = random_smooth_field(g, h, 5);
  const WaveField mf = h_fourier(f);
  CHECK(std::abs(mf.norm() - f.norm()) < 1e-12);
  const WaveField back = h_fourier_inverse(mf, g);
  double err = 0.0;
  for (Index i = 0; i < f.samples.size(); ++i)
    err = std::max(err, std::abs(back.samples[i] - f.samples[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("h_fourier maps a packet to the packet at Jz") {
  // F_h(e^{ipq/2h} g_z) = e^{-ipq/2h} g_{Jz},  Jz = (p, -q)
  const GridSpec g = GridSpec::line(-4.0, 4.0, 512);
  const double h = 1.0 / 16;
  const double q = 0.4, p = 0.7;
  const WaveField gz = packet_field(q, p, h, g);
  WaveField lhs = gz;
  const Complex pre = std::exp(Complex(0.0, p * q / (2.0 * h)));
  lhs.samples *= pre;
  const WaveField F = h_fourier(lhs);

  // expected: e^{-ipq/2h} g_{(p,-q)} evaluated on the momentum grid
  // (sampled without the resolution validation; only grid-point values are compared)
  PhasePoint zj;
  zj.q = VectorXd::Constant(1, p);
  zj.p = VectorXd::Constant(1, -q);
  wavepackets::RenderOptions ro;
  ro.validate = false;
  const WaveField gJ =
      wavepackets::render(wavepackets::GaussianPacket::standard(zj, h), F.grid, ro);
  double err = 0.0;
  for (Index i = 0; i < F.samples.size(); ++i)
    err = std::max(err, std::abs(F.samples[i] - std::conj(pre) * gJ.samples[i]));
  CHECK(err < 1e-9);
}

TEST_CASE("moments: packet saturates the uncertainty product") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 1024);
  for (double h : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
    const WaveField f = packet_field(0.3, 0.5, h, g);
    const Moments m = moments(f);
    CHECK(m.mean_x[0] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(m.mean_xi[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m.dev_x[0] == doctest::Approx(std::sqrt(h / 2)).epsilon(1e-8));
    CHECK(m.dev_xi[0] == doctest::Approx(std::sqrt(h / 2)).epsilon(1e-8));
  }
}

TEST_CASE("moments: translation shifts the mean, deviations unchanged") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 512);
  const double h = 1.0 / 32;
  const Moments m0 = moments(packet_field(0.0, 0.4, h, g));
  const Moments m1 = moments(packet_field(0.8, 0.4, h, g));
  CHECK(m1.mean_x[0] - m0.mean_x[0] == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(m1.dev_x[0] == doctest::Approx(m0.dev_x[0]).epsilon(1e-10));
  CHECK(m1.dev_xi[0] == doctest::Approx(m0.dev_xi[0]).epsilon(1e-10));
}

TEST_CASE("moments: uncertainty product bounded below for random fields") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 512);
  const double h = 1.0 / 64;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const WaveField f = random_smooth_field(g, h, 100 + s);
    const Moments m = moments(f);
    CHECK(m.dev_x[0] * m.dev_xi[0] >= 0.5 * h - 1e-8);
  }
}

TEST_CASE("wigner: Gaussian packet has the Gaussian phase-space density") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 512);
  const double h = 1.0 / 32;
  const double q = 0.3, p = 0.4;
  const WaveField f = packet_field(q, p, h, g);
  WignerDiagnostics diag;
  const PhaseSpaceField W = wigner(f, GridSpec(), &diag);
  CHECK(diag.max_imag < 1e-10);
  const double peak = 1.0 / (kPi * h);
  double sup_rel = 0.0;
  for (Index i = 0; i < W.xgrid.size(); ++i) {
    const double x = W.xgrid.point(0, i);
    for (Index m = 0; m < W.xigrid.size(); ++m) {
      const double xi = W.xigrid.point(0, m);
      const double exact =
          peak * std::exp(-((x - q) * (x - q) + (xi - p) * (xi - p)) / h);
      sup_rel = std::max(sup_rel,
                         std::abs(std::real(W.values[W.flat(i, m)]) - exact) / peak);
    }
  }
  CHECK(sup_rel < 1e-4);

  // total mass and marginals
  CHECK(W.total_mass() == doctest::Approx(f.norm_sq()).epsilon(1e-6));
  const VectorXd mx = marginal_x(W);
  double mex = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    mex = std::max(mex, std::abs(mx[i] - std::norm(f.samples[i])));
  CHECK(mex < 1e-6);

  const WaveField mf = h_fourier(f);
  const VectorXd mxi = marginal_xi(W);
  // wigner xi-grid is half-spaced: even slots align with the F_h grid
  double mep = 0.0;
  for (Index m = 0; m < W.xigrid.size(); ++m) {
    const double xi = W.xigrid.point(0, m);
    for (Index j = 0; j < mf.grid.size(); ++j) {
      if (std::abs(mf.grid.point(0, j) - xi) < 1e-12)
        mep = std::max(mep, std::abs(mxi[m] - std::norm(mf.samples[j])));
    }
  }
  CHECK(mep < 1e-6);
}

TEST_CASE("bargmann: isometry, Gaussian overlap, inversion") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 512);
  const double h = 1.0 / 32;
  const double q = 0.2, p = -0.3;
  const WaveField f = packet_field(q, p, h, g);

  BargmannDiagnostics diag;
  const PhaseSpaceField B = bargmann(f, {}, &diag);
  CHECK(std::abs(B.abs2_mass() / f.norm_sq() - 1.0) < 1e-3);
  CHECK(!diag.coverage_flag);

  // |B[g_z0](z)| = (2 pi h)^{-1/2} exp(-|z-z0|^2/(4h))
  double sup = 0.0;
  const double pref = std::pow(2.0 * kPi * h, -0.5);
  for (Index iq = 0; iq < B.xgrid.size(); ++iq)
    for (Index ip = 0; ip < B.xigrid.size(); ++ip) {
      const double dq = B.xgrid.point(0, iq) - q;
      const double dp = B.xigrid.point(0, ip) - p;
      const double expected = pref * std::exp(-(dq * dq + dp * dp) / (4.0 * h));
      sup = std::max(sup, std::abs(std::abs(B.values[B.flat(iq, ip)]) - expected) / pref);
    }
  CHECK(sup < 1e-6);

  const WaveField back = bargmann_synthesis(B, g);
  double rel = 0.0;
  double nrm = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    rel += std::norm(back.samples[i] - f.samples[i]);
    nrm += std::norm(f.samples[i]);
  }
  CHECK(std::sqrt(rel / nrm) < 1e-3);
}

TEST_CASE("h-oscillation tail: plane wave and constant field") {
  const GridSpec g = GridSpec::line(0.0, 2.0 * kPi, 256);
  const double h = 1.0 / 64;
  // constant field on the torus: single mode at xi = 0
  WaveField c(g, h, VectorXcd::Constant(256, Complex(1.0, 0.0)));
  c.normalize();
  CHECK(h_oscillation_tail(c, 0.5) == doctest::Approx(0.0));

  // plane wave e^{ix/h}: matched single mode at xi = 1
  WaveField pw = WaveField::from_profile(
      g, h, [&](const VectorXd& x) { return std::exp(Complex(0.0, x[0] / h)); });
  pw.normalize();
  CHECK(h_oscillation_tail(pw, 2.0) == doctest::Approx(0.0));
  CHECK(h_oscillation_tail(pw, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

  // Gaussian packet with p = 1: tail at R = 2 is exponentially small
  const GridSpec gg = GridSpec::line(-4.0, 4.0, 512);
  const WaveField gz = packet_field(0.0, 1.0, h, gg);
  CHECK(h_oscillation_tail(gz, 2.0) < std::exp(-1.0 / h));
  // tail is non-increasing in R
  CHECK(h_oscillation_tail(gz, 1.0) >= h_oscillation_tail(gz, 2.0));
}

TEST_CASE("sobolev norm: s = 0 is L2, single-mode growth") {
  const GridSpec g = GridSpec::line(0.0, 2.0 * kPi, 256);
  const double h = 1.0 / 32;
  const WaveField f = random_smooth_field(g, h, 17);
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(f.norm()).epsilon(1e-12));

  // matched plane wave e^{ix/h}: multiplier (1+1)^{s/2}
  WaveField pw = WaveField::from_profile(
      g, h, [&](const VectorXd& x) { return std::exp(Complex(0.0, x[0] / h)); });
  pw.normalize();
  for (double s : {1.0, 2.0, 3.5}) {
    CHECK(sobolev_norm(pw, s) ==
          doctest::Approx(std::pow(2.0, 0.5 * s) * pw.norm()).epsilon(1e-10));
  }

  // Gaussian packet: bounded uniformly in h (no oscillation)
  const GridSpec gg = GridSpec::line(-4.0, 4.0, 1024);
  double prev = 0.0;
  for (double hh : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
    const double v = sobolev_norm(packet_field(0.0, 0.0, hh, gg), 2.0);
    CHECK(v < 1.5);
    prev = v;
  }
  (void)prev;
}

TEST_CASE("boundary ratio flags non-negligible fields") {
  const GridSpec g = GridSpec::line(-4.0, 4.0, 256);
  const WaveField f = packet_field(0.0, 0.0, 1.0 / 16, g);
  CHECK(f.boundary_negligible(1e-8));
  WaveField bad(g, 0.5, VectorXcd::Constant(256, Complex(1.0, 0.0)));
  CHECK(!bad.boundary_negligible(1e-8));
}
