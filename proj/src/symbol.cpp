#include "sclab/symbol.hpp"

namespace sclab {

namespace {

long binom(int n, int k) {
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

double falling(int n, int k) {  // n (n-1) ... (n-k+1)
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= double(n - i);
  return r;
}

}  // namespace

double hermite_phys(int k, double u) {
  double h0 = 1.0;
  if (k == 0) return h0;
  double h1 = 2.0 * u;
  for (int i = 1; i < k; ++i) {
    const double h2 = 2.0 * u * h1 - 2.0 * double(i) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

Complex Symbol::deriv(int ax, int axi, double x, double xi) const {
  if (ncomp != 1) throw DimensionError("Symbol: scalar access on a matrix symbol");
  return scalar(ax, axi, x, xi);
}

MatrixXcd Symbol::value_m(double x, double xi) const { return deriv_m(0, 0, x, xi); }

MatrixXcd Symbol::deriv_m(int ax, int axi, double x, double xi) const {
  if (ncomp == 1) {
    MatrixXcd m(1, 1);
    m(0, 0) = scalar(ax, axi, x, xi);
    return m;
  }
  return matrix(ax, axi, x, xi);
}

double Symbol::seminorm(int k, const GridSpec& xgrid, double h) const {
  const GridSpec pgrid = xgrid.momentum_grid(h);
  const Index nx = xgrid.count(0), np = pgrid.count(0);
  const Index sx = std::max<Index>(1, nx / 128), sp = std::max<Index>(1, np / 128);
  double sup = 0.0;
  for (int ax = 0; ax <= std::min(k, max_derivative); ++ax) {
    for (int axi = 0; ax + axi <= std::min(k, max_derivative); ++axi) {
      for (Index i = 0; i < nx; i += sx) {
        for (Index m = 0; m < np; m += sp) {
          const MatrixXcd v = deriv_m(ax, axi, xgrid.point(0, i), pgrid.point(0, m));
          sup = std::max(sup, v.cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return sup;
}

double Symbol::band_edge_fraction(const GridSpec& xgrid, double h) const {
  const GridSpec pgrid = xgrid.momentum_grid(h);
  const Index nx = xgrid.count(0), np = pgrid.count(0);
  const Index sx = std::max<Index>(1, nx / 128);
  double sup = 0.0, edge = 0.0;
  for (Index i = 0; i < nx; i += sx) {
    for (Index m = 0; m < np; ++m) {
      const double a = value_m(xgrid.point(0, i), pgrid.point(0, m)).cwiseAbs().maxCoeff();
      sup = std::max(sup, a);
      const Index s = std::abs(m - np / 2);
      if (double(s) >= double(np) / 4.0) edge = std::max(edge, a);
    }
  }
  return sup > 0 ? edge / sup : 0.0;
}

double symbol_derivative_defect(const Symbol& a, const GridSpec& xgrid, double h, int probes,
                                std::uint64_t seed) {
  const GridSpec pgrid = xgrid.momentum_grid(h);
  CounterRng rng(seed);
  const double step = 1e-4;
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const double x = xgrid.lo()[0] + rng.uniform(2 * k) * xgrid.length(0);
    const double xi = pgrid.lo()[0] + rng.uniform(2 * k + 1) * pgrid.length(0);
    const MatrixXcd dx_fd =
        (a.deriv_m(0, 0, x + step, xi) - a.deriv_m(0, 0, x - step, xi)) / (2.0 * step);
    const MatrixXcd dxi_fd =
        (a.deriv_m(0, 0, x, xi + step) - a.deriv_m(0, 0, x, xi - step)) / (2.0 * step);
    const double scale = std::max(1.0, a.value_m(x, xi).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (dx_fd - a.deriv_m(1, 0, x, xi)).cwiseAbs().maxCoeff() / scale);
    worst = std::max(worst,
                     (dxi_fd - a.deriv_m(0, 1, x, xi)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// --- scalar families --------------------------------------------------------

Symbol sym_polynomial(const std::vector<MonomialTerm>& terms) {
  int deg = 0;
  for (const auto& t : terms) deg = std::max(deg, t.xipow);
  Symbol s;
  s.class_order = deg;
  s.max_derivative = 8;
  s.scalar = [terms](int ax, int axi, double x, double xi) -> Complex {
    double v = 0.0;
    for (const auto& t : terms) {
      if (t.xpow < ax || t.xipow < axi) continue;
      v += t.coeff * falling(t.xpow, ax) * std::pow(x, t.xpow - ax) *
           falling(t.xipow, axi) * std::pow(xi, t.xipow - axi);
    }
    return v;
  };
  return s;
}

Symbol sym_x() { return sym_polynomial({{1.0, 1, 0}}); }
Symbol sym_xi() { return sym_polynomial({{1.0, 0, 1}}); }
Symbol sym_constant(double c) { return sym_polynomial({{c, 0, 0}}); }

namespace {

// d^k/dt^k exp(-(t-c)^2/(2 s^2)) = (-1/(s sqrt2))^k H_k(u) exp(-u^2),
// u = (t-c)/(s sqrt2)
double gauss_deriv(int k, double t, double c, double s) {
  const double u = (t - c) / (s * std::sqrt(2.0));
  return std::pow(-1.0 / (s * std::sqrt(2.0)), k) * hermite_phys(k, u) * std::exp(-u * u);
}

}  // namespace

Symbol sym_gaussian_bump(double x0, double xi0, double sx, double sxi, double amp) {
  Symbol s;
  s.class_order = 0;
  s.max_derivative = 8;
  s.scalar = [=](int ax, int axi, double x, double xi) -> Complex {
    return amp * gauss_deriv(ax, x, x0, sx) * gauss_deriv(axi, xi, xi0, sxi);
  };
  return s;
}

Symbol sym_poly_times_gaussian(const std::vector<MonomialTerm>& poly, double x0, double xi0,
                               double sx, double sxi) {
  return sym_product(sym_polynomial(poly), sym_gaussian_bump(x0, xi0, sx, sxi));
}

Symbol sym_reciprocal(const Symbol& p, int class_order) {
  Symbol s;
  s.class_order = class_order;
  s.max_derivative = 2;
  s.is_real = p.is_real;
  s.scalar = [p](int ax, int axi, double x, double xi) -> Complex {
    const Complex v = p.deriv(0, 0, x, xi);
    const int order = ax + axi;
    if (order == 0) return 1.0 / v;
    if (order == 1) return -p.deriv(ax, axi, x, xi) / (v * v);
    if (ax == 2 || axi == 2) {
      const Complex d1 = p.deriv(ax / 2, axi / 2, x, xi);
      return (2.0 * d1 * d1 - v * p.deriv(ax, axi, x, xi)) / (v * v * v);
    }
    // mixed second derivative
    const Complex px = p.deriv(1, 0, x, xi);
    const Complex pxi = p.deriv(0, 1, x, xi);
    return (2.0 * px * pxi - v * p.deriv(1, 1, x, xi)) / (v * v * v);
  };
  return s;
}

Symbol sym_sum(const Symbol& a, const Symbol& b, Complex wa, Complex wb) {
  if (a.ncomp != b.ncomp) throw DimensionError("sym_sum: component mismatch");
  Symbol s;
  s.ncomp = a.ncomp;
  s.class_order = std::max(a.class_order, b.class_order);
  s.max_derivative = std::min(a.max_derivative, b.max_derivative);
  s.is_real = a.is_real && b.is_real && wa.imag() == 0.0 && wb.imag() == 0.0;
  if (s.ncomp == 1) {
    s.scalar = [a, b, wa, wb](int ax, int axi, double x, double xi) {
      return wa * a.scalar(ax, axi, x, xi) + wb * b.scalar(ax, axi, x, xi);
    };
  } else {
    s.matrix = [a, b, wa, wb](int ax, int axi, double x, double xi) {
      return (wa * a.deriv_m(ax, axi, x, xi) + wb * b.deriv_m(ax, axi, x, xi)).eval();
    };
  }
  return s;
}

Symbol sym_product(const Symbol& a, const Symbol& b) {
  if (a.ncomp != 1 || b.ncomp != 1)
    throw DimensionError("sym_product: scalar symbols only");
  Symbol s;
  s.class_order = a.class_order + b.class_order;
  s.max_derivative = std::min(a.max_derivative, b.max_derivative);
  s.is_real = a.is_real && b.is_real;
  s.scalar = [a, b](int ax, int axi, double x, double xi) -> Complex {
    Complex v = 0.0;
    for (int i = 0; i <= ax; ++i)
      for (int j = 0; j <= axi; ++j)
        v += double(binom(ax, i) * binom(axi, j)) * a.scalar(i, j, x, xi) *
             b.scalar(ax - i, axi - j, x, xi);
    return v;
  };
  return s;
}

Symbol sym_function_of_x(const SmoothFunction& F) {
  Symbol s;
  s.class_order = 0;
  s.max_derivative = 8;
  s.scalar = [F](int ax, int axi, double x, double) -> Complex {
    if (axi > 0) return 0.0;
    return F.deriv(ax, x);
  };
  return s;
}

Symbol sym_windowed_x(double r, double rolloff) {
  return sym_product(sym_x(), sym_function_of_x(smooth_plateau(-r, r, rolloff)));
}

Symbol sym_poisson(const Symbol& a, const Symbol& b) {
  if (a.ncomp != 1 || b.ncomp != 1)
    throw DimensionError("sym_poisson: scalar symbols only");
  Symbol s;
  s.class_order = a.class_order + b.class_order - 1;
  s.max_derivative = 1;
  s.is_real = a.is_real && b.is_real;
  s.scalar = [a, b](int ax, int axi, double x, double xi) -> Complex {
    auto da = [&](int i, int j) { return a.scalar(i, j, x, xi); };
    auto db = [&](int i, int j) { return b.scalar(i, j, x, xi); };
    if (ax == 0 && axi == 0) return da(0, 1) * db(1, 0) - da(1, 0) * db(0, 1);
    if (ax == 1 && axi == 0)
      return da(1, 1) * db(1, 0) + da(0, 1) * db(2, 0) - da(2, 0) * db(0, 1) -
             da(1, 0) * db(1, 1);
    if (ax == 0 && axi == 1)
      return da(0, 2) * db(1, 0) + da(0, 1) * db(1, 1) - da(1, 1) * db(0, 1) -
             da(1, 0) * db(0, 2);
    throw std::invalid_argument("sym_poisson: derivatives available to order 1");
  };
  return s;
}

Symbol sym_compose(const SmoothFunction& F, const Symbol& a) {
  if (a.ncomp != 1) throw DimensionError("sym_compose: scalar symbols only");
  Symbol s;
  s.class_order = 0;
  s.max_derivative = 2;
  s.is_real = true;
  s.scalar = [F, a](int ax, int axi, double x, double xi) -> Complex {
    const double v = std::real(a.scalar(0, 0, x, xi));
    const int order = ax + axi;
    if (order == 0) return F.deriv(0, v);
    if (order == 1) return F.deriv(1, v) * a.scalar(ax, axi, x, xi);
    const Complex d1a = a.scalar(ax > 0 ? 1 : 0, ax > 0 ? 0 : 1, x, xi);
    const Complex d1b = a.scalar(ax == 2 ? 1 : 0, axi >= 1 ? 1 : 0, x, xi);
    return F.deriv(2, v) * d1a * d1b + F.deriv(1, v) * a.scalar(ax, axi, x, xi);
  };
  return s;
}

// --- matrix families --------------------------------------------------------

Symbol sym_matrix2(const Symbol& a11, const Symbol& a12, const Symbol& a22) {
  Symbol s;
  s.ncomp = 2;
  s.class_order = std::max({a11.class_order, a12.class_order, a22.class_order});
  s.max_derivative =
      std::min({a11.max_derivative, a12.max_derivative, a22.max_derivative});
  s.is_real = true;  // Hermitian-valued
  s.matrix = [a11, a12, a22](int ax, int axi, double x, double xi) {
    MatrixXcd m(2, 2);
    m(0, 0) = a11.scalar(ax, axi, x, xi);
    m(0, 1) = a12.scalar(ax, axi, x, xi);
    m(1, 0) = std::conj(m(0, 1));
    m(1, 1) = a22.scalar(ax, axi, x, xi);
    return m;
  };
  return s;
}

Symbol sym_rank_one_matrix_bump(double sx, double sxi, double amp) {
  const Symbol a11 = sym_poly_times_gaussian({{amp, 2, 0}}, 0, 0, sx, sxi);
  const Symbol a12 = sym_poly_times_gaussian({{amp, 1, 1}}, 0, 0, sx, sxi);
  const Symbol a22 = sym_poly_times_gaussian({{amp, 0, 2}}, 0, 0, sx, sxi);
  return sym_matrix2(a11, a12, a22);
}

// --- smooth functions -------------------------------------------------------

SmoothFunction smooth_gaussian(double c, double w, double amp) {
  SmoothFunction f;
  f.support_lo = c - 9.0 * w;
  f.support_hi = c + 9.0 * w;
  f.deriv = [=](int k, double t) {
    const double u = (t - c) / w;
    return amp * std::pow(-1.0 / w, k) * hermite_phys(k, u) * std::exp(-u * u);
  };
  return f;
}

SmoothFunction smooth_plateau(double a, double b, double w) {
  SmoothFunction f;
  f.support_lo = a - 9.0 * w;
  f.support_hi = b + 9.0 * w;
  f.deriv = [=](int k, double t) {
    const double ua = (t - a) / w, ub = (t - b) / w;
    if (k == 0) return 0.5 * (std::erf(ua) - std::erf(ub));
    const double pref = 1.0 / (w * std::sqrt(kPi));
    const double da = std::pow(-1.0 / w, k - 1) * hermite_phys(k - 1, ua) * std::exp(-ua * ua);
    const double db = std::pow(-1.0 / w, k - 1) * hermite_phys(k - 1, ub) * std::exp(-ub * ub);
    return pref * (da - db);
  };
  return f;
}

SmoothFunction smooth_identity(double lo, double hi) {
  SmoothFunction f;
  f.support_lo = lo;
  f.support_hi = hi;
  f.deriv = [](int k, double t) {
    if (k == 0) return t;
    if (k == 1) return 1.0;
    return 0.0;
  };
  return f;
}

SmoothFunction smooth_const(double c, double lo, double hi) {
  SmoothFunction f;
  f.support_lo = lo;
  f.support_hi = hi;
  f.deriv = [c](int k, double) { return k == 0 ? c : 0.0; };
  return f;
}

}  // namespace sclab
