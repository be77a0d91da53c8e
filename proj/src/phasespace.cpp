#include "sclab/phasespace.hpp"

#include <cmath>
#include <limits>

namespace sclab {

// ---------------------------------------------------------------------------
// RK45 (Dormand-Prince) with FSAL
// ---------------------------------------------------------------------------

namespace {

constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;

}  // namespace

VectorXd integrate_rk45(const std::function<void(double, const VectorXd&, VectorXd&)>& f,
                        double t0, double t1, VectorXd y0, const OdeOptions& opts,
                        const OdeObserver& observer) {
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) {
    if (observer) observer(t0, y0);
    return y0;
  }

  const Index n = y0.size();
  VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  double t = t0;
  VectorXd y = y0;
  f(t, y, k1);

  double h = opts.initial_step;
  if (h <= 0.0) {
    const double d0 = 1.0 + y.norm();
    const double d1 = 1.0 + k1.norm();
    h = std::min(span, 0.01 * d0 / d1);
  }
  h = std::min(h, span);

  if (observer && !observer(t, y)) return y;

  for (long step = 0; step < opts.max_steps; ++step) {
    const double remaining = std::abs(t1 - t);
    if (remaining <= 1e-15 * (1.0 + std::abs(t1))) break;
    h = std::min(h, remaining);
    const double hs = dir * h;

    ytmp = y + hs * (kA21 * k1);
    f(t + kC2 * hs, ytmp, k2);
    ytmp = y + hs * (kA31 * k1 + kA32 * k2);
    f(t + kC3 * hs, ytmp, k3);
    ytmp = y + hs * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    f(t + kC4 * hs, ytmp, k4);
    ytmp = y + hs * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    f(t + kC5 * hs, ytmp, k5);
    ytmp = y + hs * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    f(t + hs, ytmp, k6);
    ynew = y + hs * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    f(t + hs, ynew, k7);
    err = hs * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    // error per unit time, relative to 1 + |y|
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double sc = 1.0 + std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double e = err[i] / sc;
      acc += e * e;
    }
    double errnorm = std::sqrt(acc / double(n));
    if (!std::isfinite(errnorm)) errnorm = std::numeric_limits<double>::max();
    const double budget = opts.tol * h;

    if (errnorm <= budget) {
      t += hs;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (observer && !observer(t, y)) return y;
      const double grow = (errnorm > 0.0)
                              ? 0.9 * std::pow(budget / errnorm, 0.25)
                              : 5.0;
      h *= std::min(5.0, std::max(0.2, grow));
    } else {
      double shrink = 0.9 * std::pow(budget / errnorm, 0.25);
      if (!std::isfinite(shrink)) shrink = 0.1;
      h *= std::min(0.9, std::max(0.1, shrink));
      if (h < opts.min_step)
        throw IntegrationFailure("integrate_rk45: step size underflow", t);
    }
    if (h < opts.min_step)
      throw IntegrationFailure("integrate_rk45: step size underflow", t);
  }

  if (std::abs(t1 - t) > 1e-12 * (1.0 + std::abs(t1)))
    throw IntegrationFailure("integrate_rk45: max step count exceeded", t);
  return y;
}

// ---------------------------------------------------------------------------
// Symplectic structure
// ---------------------------------------------------------------------------

MatrixXd symplectic_matrix(int d) {
  MatrixXd J = MatrixXd::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = MatrixXd::Identity(d, d);
  J.bottomLeftCorner(d, d) = -MatrixXd::Identity(d, d);
  return J;
}

double symplectic_form(const PhasePoint& z, const PhasePoint& w) {
  if (z.dim() != w.dim()) throw DimensionError("symplectic_form: dimension mismatch");
  // Jz.w with J = [[0, I], [-I, 0]] acting on (q, p)
  return z.p.dot(w.q) - z.q.dot(w.p);
}

VectorXd hamiltonian_vector_field(const Hamiltonian& ham, double t, const PhasePoint& z) {
  const VectorXd g = ham.gradient(t, z);
  const int d = z.dim();
  VectorXd v(2 * d);
  v.head(d) = g.tail(d);   // dx/dt =  dp/dxi
  v.tail(d) = -g.head(d);  // dxi/dt = -dp/dx
  return v;
}

// ---------------------------------------------------------------------------
// Flow map with variational equation and action
// ---------------------------------------------------------------------------

FlowData flow(const Hamiltonian& ham, const PhasePoint& z0, double s, double t,
              double tol, const FlowObserver& observer) {
  const int d = z0.dim();
  const Index nz = 2 * d;
  const Index nf = nz * nz;

  // State layout: [z (2d) | F row-major (4d^2) | S]
  VectorXd y0(nz + nf + 1);
  y0.head(nz).head(d) = z0.q;
  y0.head(nz).tail(d) = z0.p;
  Eigen::Map<MatrixXd>(y0.data() + nz, nz, nz) = MatrixXd::Identity(nz, nz);
  y0[nz + nf] = 0.0;

  auto rhs = [&](double tt, const VectorXd& y, VectorXd& dy) {
    PhasePoint z{y.segment(0, d), y.segment(d, d)};
    const VectorXd g = ham.gradient(tt, z);
    dy.segment(0, d) = g.tail(d);
    dy.segment(d, d) = -g.head(d);
    const MatrixXd H = ham.hessian(tt, z);
    Eigen::Map<const MatrixXd> F(y.data() + nz, nz, nz);
    MatrixXd JH(nz, nz);
    JH.topRows(d) = H.bottomRows(d);
    JH.bottomRows(d) = -H.topRows(d);
    Eigen::Map<MatrixXd>(dy.data() + nz, nz, nz) = JH * F;
    // action density: xi . dx/dt - p
    dy[nz + nf] = z.p.dot(dy.segment(0, d)) - ham.value(tt, z);
  };

  OdeOptions opts;
  opts.tol = tol;

  OdeObserver obs;
  if (observer) {
    obs = [&](double tt, const VectorXd& y) {
      FlowData snap;
      snap.s = s;
      snap.t = tt;
      snap.endpoint = PhasePoint{y.segment(0, d), y.segment(d, d)};
      Eigen::Map<const MatrixXd> F(y.data() + nz, nz, nz);
      snap.A = F.topLeftCorner(d, d);
      snap.B = F.topRightCorner(d, d);
      snap.C = F.bottomLeftCorner(d, d);
      snap.D = F.bottomRightCorner(d, d);
      snap.action = y[nz + nf];
      return observer(snap);
    };
  }

  const VectorXd yt = integrate_rk45(rhs, s, t, std::move(y0), opts, obs);

  FlowData out;
  out.s = s;
  out.t = t;
  out.endpoint = PhasePoint{yt.segment(0, d), yt.segment(d, d)};
  Eigen::Map<const MatrixXd> F(yt.data() + nz, nz, nz);
  out.A = F.topLeftCorner(d, d);
  out.B = F.topRightCorner(d, d);
  out.C = F.bottomLeftCorner(d, d);
  out.D = F.bottomRightCorner(d, d);
  out.action = yt[nz + nf];
  return out;
}

MatrixXd FlowData::jacobian() const {
  const Index d = A.rows();
  MatrixXd F(2 * d, 2 * d);
  F.topLeftCorner(d, d) = A;
  F.topRightCorner(d, d) = B;
  F.bottomLeftCorner(d, d) = C;
  F.bottomRightCorner(d, d) = D;
  return F;
}

double FlowData::symplectic_defect() const {
  const MatrixXd F = jacobian();
  const MatrixXd J = symplectic_matrix(static_cast<int>(A.rows()));
  return (F.transpose() * J * F - J).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Built-in Hamiltonian families
// ---------------------------------------------------------------------------

Hamiltonian Hamiltonian::free_particle(int d) {
  Hamiltonian h;
  h.name = "free";
  h.value = [](double, const PhasePoint& z) { return 0.5 * z.p.squaredNorm(); };
  h.gradient = [d](double, const PhasePoint& z) {
    VectorXd g = VectorXd::Zero(2 * d);
    g.tail(d) = z.p;
    return g;
  };
  h.hessian = [d](double, const PhasePoint&) {
    MatrixXd H = MatrixXd::Zero(2 * d, 2 * d);
    H.bottomRightCorner(d, d) = MatrixXd::Identity(d, d);
    return H;
  };
  return h;
}

Hamiltonian Hamiltonian::harmonic(int d, double omega) {
  Hamiltonian h;
  h.name = "harmonic";
  h.value = [omega](double, const PhasePoint& z) {
    return 0.5 * z.p.squaredNorm() + 0.5 * omega * omega * z.q.squaredNorm();
  };
  h.gradient = [d, omega](double, const PhasePoint& z) {
    VectorXd g(2 * d);
    g.head(d) = omega * omega * z.q;
    g.tail(d) = z.p;
    return g;
  };
  h.hessian = [d, omega](double, const PhasePoint&) {
    MatrixXd H = MatrixXd::Identity(2 * d, 2 * d);
    H.topLeftCorner(d, d) *= omega * omega;
    return H;
  };
  return h;
}

Hamiltonian Hamiltonian::quartic(int d) {
  // kinetic + x^4/4 + x^2/2 (per axis)
  Hamiltonian h;
  h.name = "quartic";
  h.value = [](double, const PhasePoint& z) {
    double v = 0.5 * z.p.squaredNorm();
    for (Index j = 0; j < z.q.size(); ++j)
      v += 0.25 * std::pow(z.q[j], 4) + 0.5 * z.q[j] * z.q[j];
    return v;
  };
  h.gradient = [d](double, const PhasePoint& z) {
    VectorXd g(2 * d);
    for (int j = 0; j < d; ++j) g[j] = std::pow(z.q[j], 3) + z.q[j];
    g.tail(d) = z.p;
    return g;
  };
  h.hessian = [d](double, const PhasePoint& z) {
    MatrixXd H = MatrixXd::Zero(2 * d, 2 * d);
    for (int j = 0; j < d; ++j) H(j, j) = 3.0 * z.q[j] * z.q[j] + 1.0;
    H.bottomRightCorner(d, d) = MatrixXd::Identity(d, d);
    return H;
  };
  return h;
}

Hamiltonian Hamiltonian::cosine(int d, double v0, double period) {
  const double k = 2.0 * kPi / period;
  Hamiltonian h;
  h.name = "cosine";
  h.value = [v0, k](double, const PhasePoint& z) {
    double v = 0.5 * z.p.squaredNorm();
    for (Index j = 0; j < z.q.size(); ++j) v += v0 * (1.0 - std::cos(k * z.q[j]));
    return v;
  };
  h.gradient = [d, v0, k](double, const PhasePoint& z) {
    VectorXd g(2 * d);
    for (int j = 0; j < d; ++j) g[j] = v0 * k * std::sin(k * z.q[j]);
    g.tail(d) = z.p;
    return g;
  };
  h.hessian = [d, v0, k](double, const PhasePoint& z) {
    MatrixXd H = MatrixXd::Zero(2 * d, 2 * d);
    for (int j = 0; j < d; ++j) H(j, j) = v0 * k * k * std::cos(k * z.q[j]);
    H.bottomRightCorner(d, d) = MatrixXd::Identity(d, d);
    return H;
  };
  return h;
}

Hamiltonian Hamiltonian::polynomial_1d(const std::vector<PolyTerm>& terms) {
  auto val = [terms](double, const PhasePoint& z) {
    double v = 0.0;
    for (const auto& tm : terms)
      v += tm.coeff * std::pow(z.q[0], tm.qpow) * std::pow(z.p[0], tm.ppow);
    return v;
  };
  auto dpow = [](double x, int k) { return k == 0 ? 0.0 : double(k) * std::pow(x, k - 1); };
  auto d2pow = [](double x, int k) {
    return k < 2 ? 0.0 : double(k) * double(k - 1) * std::pow(x, k - 2);
  };
  Hamiltonian h;
  h.name = "polynomial";
  h.value = val;
  h.gradient = [terms, dpow](double, const PhasePoint& z) {
    VectorXd g = VectorXd::Zero(2);
    for (const auto& tm : terms) {
      g[0] += tm.coeff * dpow(z.q[0], tm.qpow) * std::pow(z.p[0], tm.ppow);
      g[1] += tm.coeff * std::pow(z.q[0], tm.qpow) * dpow(z.p[0], tm.ppow);
    }
    return g;
  };
  h.hessian = [terms, dpow, d2pow](double, const PhasePoint& z) {
    MatrixXd H = MatrixXd::Zero(2, 2);
    for (const auto& tm : terms) {
      H(0, 0) += tm.coeff * d2pow(z.q[0], tm.qpow) * std::pow(z.p[0], tm.ppow);
      H(1, 1) += tm.coeff * std::pow(z.q[0], tm.qpow) * d2pow(z.p[0], tm.ppow);
      const double cross = tm.coeff * dpow(z.q[0], tm.qpow) * dpow(z.p[0], tm.ppow);
      H(0, 1) += cross;
      H(1, 0) += cross;
    }
    return H;
  };
  return h;
}

}  // namespace sclab
