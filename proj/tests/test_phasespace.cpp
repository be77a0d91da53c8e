#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sclab/phasespace.hpp"

using namespace sclab;

namespace {

PhasePoint random_point(const CounterRng& rng, std::uint64_t k, int d) {
  PhasePoint z;
  z.q.resize(d);
  z.p.resize(d);
  for (int j = 0; j < d; ++j) {
    z.q[j] = 2.0 * rng.uniform(1000 * k + 2 * j) - 1.0;
    z.p[j] = 2.0 * rng.uniform(1000 * k + 2 * j + 1) - 1.0;
  }
  return z;
}

}  // namespace

TEST_CASE("symplectic form: block formula, antisymmetry") {
  const PhasePoint z = PhasePoint::make({1.0}, {0.0});
  const PhasePoint w = PhasePoint::make({0.0}, {1.0});
  // J(q,p) = (p, -q): omega((1,0),(0,1)) = J(1,0).(0,1) = (0,-1).(0,1) = -1
  CHECK(symplectic_form(z, w) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(symplectic_form(w, z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(symplectic_form(z, z) == 0.0);

  CounterRng rng(42);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint a = random_point(rng, 2 * k, 3);
    const PhasePoint b = random_point(rng, 2 * k + 1, 3);
    CHECK(symplectic_form(a, b) == doctest::Approx(-symplectic_form(b, a)).epsilon(1e-14));
  }

  const MatrixXd J = symplectic_matrix(3);
  CHECK((J * J + MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(symplectic_form(z, random_point(rng, 99, 2)), DimensionError);
}

TEST_CASE("hamiltonian vector field: free particle and x.xi") {
  const auto free1 = Hamiltonian::free_particle(1);
  const PhasePoint z = PhasePoint::make({0.3}, {0.7});
  const VectorXd v = hamiltonian_vector_field(free1, 0.0, z);
  CHECK(v[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-15));

  // p = x.xi at (1,1): J grad p = J(1,1) = (1,-1)
  const auto pxxi = Hamiltonian::polynomial_1d({{1.0, 1, 1}});
  const VectorXd u = hamiltonian_vector_field(pxxi, 0.0, PhasePoint::make({1.0}, {1.0}));
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian fields are divergence free (finite differences)") {
  const auto ham = Hamiltonian::polynomial_1d(
      {{0.5, 0, 2}, {0.25, 4, 0}, {0.3, 2, 1}, {0.1, 1, 3}});
  CounterRng rng(7);
  const double step = 1e-5;
  for (int k = 0; k < 10; ++k) {
    const PhasePoint z = random_point(rng, k, 1);
    double div = 0.0;
    for (int j = 0; j < 2; ++j) {
      PhasePoint zp = z, zm = z;
      (j == 0 ? zp.q[0] : zp.p[0]) += step;
      (j == 0 ? zm.q[0] : zm.p[0]) -= step;
      div += (hamiltonian_vector_field(ham, 0.0, zp)[j] -
              hamiltonian_vector_field(ham, 0.0, zm)[j]) /
             (2.0 * step);
    }
    CHECK(std::abs(div) < 1e-7);
  }
}

TEST_CASE("built-in gradients and hessians match finite differences") {
  const std::vector<Hamiltonian> fams = {
      Hamiltonian::free_particle(2), Hamiltonian::harmonic(2, 1.3), Hamiltonian::quartic(1),
      Hamiltonian::cosine(1, 0.4, 2.0),
      Hamiltonian::polynomial_1d({{0.5, 0, 2}, {1.0, 3, 1}})};
  CounterRng rng(3);
  const double step = 1e-4;
  for (size_t f = 0; f < fams.size(); ++f) {
    const auto& ham = fams[f];
    const int d = f < 2 ? 2 : 1;
    for (int k = 0; k < 5; ++k) {
      const PhasePoint z = random_point(rng, 10 * f + k, d);
      const VectorXd g = ham.gradient(0.0, z);
      const MatrixXd H = ham.hessian(0.0, z);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      for (int j = 0; j < 2 * d; ++j) {
        PhasePoint zp = z, zm = z;
        (j < d ? zp.q[j % d] : zp.p[j % d]) += step;
        (j < d ? zm.q[j % d] : zm.p[j % d]) -= step;
        const double fd = (ham.value(0.0, zp) - ham.value(0.0, zm)) / (2.0 * step);
        CHECK(std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])) < 1e-5);
        const VectorXd hcol =
            (ham.gradient(0.0, zp) - ham.gradient(0.0, zm)) / (2.0 * step);
        for (int i = 0; i < 2 * d; ++i)
          CHECK(std::abs(hcol[i] - H(i, j)) / std::max(1.0, std::abs(H(i, j))) < 1e-5);
      }
    }
  }
}

TEST_CASE("flow: free particle drifts, t = s is the identity") {
  const auto ham = Hamiltonian::free_particle(2);
  PhasePoint z0 = PhasePoint::make({0.2, -0.4}, {1.0, 0.5});
  const FlowData fd = flow(ham, z0, 0.0, 0.7, 1e-11);
  CHECK(fd.endpoint.q[0] == doctest::Approx(0.2 + 0.7 * 1.0).epsilon(1e-10));
  CHECK(fd.endpoint.q[1] == doctest::Approx(-0.4 + 0.7 * 0.5).epsilon(1e-10));
  CHECK(fd.endpoint.p[0] == doctest::Approx(1.0).epsilon(1e-12));
  // action for the free flow: |p|^2 t / 2
  CHECK(fd.action == doctest::Approx(0.5 * 1.25 * 0.7).epsilon(1e-10));

  const FlowData id = flow(Hamiltonian::quartic(1), PhasePoint::make({0.9}, {-0.3}), 0.5, 0.5,
                           1e-11);
  CHECK(id.endpoint.q[0] == 0.9);
  CHECK(id.A(0, 0) == 1.0);
  CHECK(id.B(0, 0) == 0.0);
  CHECK(id.action == 0.0);
}

TEST_CASE("flow: harmonic oscillator closes after one period") {
  const auto ham = Hamiltonian::harmonic(1);
  const PhasePoint z0 = PhasePoint::make({1.1}, {-0.2});
  const FlowData fd = flow(ham, z0, 0.0, 2.0 * kPi, 1e-12);
  CHECK(fd.endpoint.q[0] == doctest::Approx(1.1).epsilon(1e-8));
  CHECK(fd.endpoint.p[0] == doctest::Approx(-0.2).epsilon(1e-8));
  CHECK((fd.jacobian() - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(fd.action) < 1e-8);

  // quarter period rotation blocks
  const FlowData q = flow(ham, z0, 0.0, 0.5 * kPi, 1e-12);
  CHECK(q.A(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(q.B(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(q.C(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("flow invariants: symplecticity, energy, group law, form invariance") {
  const auto ham = Hamiltonian::quartic(1);
  CounterRng rng(11);
  const double tol = 1e-10;
  for (int k = 0; k < 6; ++k) {
    const PhasePoint z0 = random_point(rng, k, 1);
    const double t = 0.5 + rng.uniform(500 + k);
    const FlowData fd = flow(ham, z0, 0.0, t, tol);
    CHECK(fd.symplectic_defect() < 10.0 * tol * std::max(1.0, t));
    CHECK(std::abs(ham.value(0.0, fd.endpoint) - ham.value(0.0, z0)) <
          10.0 * tol * std::max(1.0, t));

    // group law through an interior time r
    const double r = 0.4 * t;
    const FlowData leg1 = flow(ham, z0, 0.0, r, tol);
    const FlowData leg2 = flow(ham, leg1.endpoint, r, t, tol);
    CHECK((leg2.endpoint.q - fd.endpoint.q).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((leg2.endpoint.p - fd.endpoint.p).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(leg1.action + leg2.action == doctest::Approx(fd.action).epsilon(1e-8));
    CHECK(((leg2.jacobian() * leg1.jacobian()) - fd.jacobian()).cwiseAbs().maxCoeff() <
          1e-7);

    // omega(Fz, Fz') = omega(z, z')
    const PhasePoint a = random_point(rng, 100 + k, 1);
    const PhasePoint b = random_point(rng, 200 + k, 1);
    const MatrixXd F = fd.jacobian();
    const VectorXd fa = F * a.joint(), fb = F * b.joint();
    PhasePoint pa, pb;
    pa.q = fa.head(1);
    pa.p = fa.tail(1);
    pb.q = fb.head(1);
    pb.p = fb.tail(1);
    CHECK(symplectic_form(pa, pb) ==
          doctest::Approx(symplectic_form(a, b)).epsilon(1e-8));
  }
}

TEST_CASE("flow: time-dependent driving term integrates correctly") {
  // p(t, z) = xi^2/2 + sin(t) x: xdot = xi, xidot = -sin(t)
  Hamiltonian ham;
  ham.value = [](double t, const PhasePoint& z) {
    return 0.5 * z.p.squaredNorm() + std::sin(t) * z.q[0];
  };
  ham.gradient = [](double t, const PhasePoint& z) {
    VectorXd g(2);
    g << std::sin(t), z.p[0];
    return g;
  };
  ham.hessian = [](double, const PhasePoint&) {
    MatrixXd H = MatrixXd::Zero(2, 2);
    H(1, 1) = 1.0;
    return H;
  };
  const double T = 1.3;
  const FlowData fd = flow(ham, PhasePoint::make({0.0}, {0.0}), 0.0, T, 1e-12);
  // xi(t) = cos(t) - 1, x(t) = sin(t) - t
  CHECK(fd.endpoint.p[0] == doctest::Approx(std::cos(T) - 1.0).epsilon(1e-9));
  CHECK(fd.endpoint.q[0] == doctest::Approx(std::sin(T) - T).epsilon(1e-9));
}

TEST_CASE("flow: integration failure carries the last valid time") {
  // runaway cubic potential drives the solution to blow-up
  const auto ham = Hamiltonian::polynomial_1d({{0.5, 0, 2}, {-5.0, 4, 0}});
  try {
    flow(ham, PhasePoint::make({1.5}, {2.0}), 0.0, 50.0, 1e-10);
    FAIL("expected IntegrationFailure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.last_valid_time() > 0.0);
    CHECK(e.last_valid_time() < 50.0);
  }
}
