#include "sclab/grid.hpp"

namespace sclab {

namespace {
bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

GridSpec::GridSpec(VectorXd lo, VectorXd hi, VectorXi n)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(n)) {
  if (lo_.size() != hi_.size() || lo_.size() != n_.size())
    throw DimensionError("GridSpec: mismatched axis descriptions");
  if (lo_.size() == 0) throw DimensionError("GridSpec: empty");
  for (int a = 0; a < dim(); ++a) {
    if (!(hi_[a] > lo_[a])) throw std::invalid_argument("GridSpec: need hi > lo");
    if (n_[a] < 8) throw std::invalid_argument("GridSpec: need n >= 8");
    if (!power_of_two(n_[a])) throw std::invalid_argument("GridSpec: n must be a power of two");
  }
}

GridSpec GridSpec::line(double a, double b, Index n) {
  VectorXd lo(1), hi(1);
  VectorXi cnt(1);
  lo << a;
  hi << b;
  cnt << static_cast<int>(n);
  return GridSpec(lo, hi, cnt);
}

GridSpec GridSpec::square(double a, double b, Index n) {
  VectorXd lo(2), hi(2);
  VectorXi cnt(2);
  lo << a, a;
  hi << b, b;
  cnt << static_cast<int>(n), static_cast<int>(n);
  return GridSpec(lo, hi, cnt);
}

Index GridSpec::size() const {
  Index s = 1;
  for (int a = 0; a < dim(); ++a) s *= n_[a];
  return s;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

VectorXd GridSpec::axis_points(int axis) const {
  VectorXd x(n_[axis]);
  for (Index i = 0; i < n_[axis]; ++i) x[i] = point(axis, i);
  return x;
}

Index GridSpec::flat(const VectorXi& idx) const {
  Index f = 0, stride = 1;
  for (int a = 0; a < dim(); ++a) {
    f += stride * idx[a];
    stride *= n_[a];
  }
  return f;
}

VectorXi GridSpec::unflat(Index flat) const {
  VectorXi idx(dim());
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat % n_[a]);
    flat /= n_[a];
  }
  return idx;
}

GridSpec GridSpec::momentum_grid(double h) const {
  VectorXd lo(dim()), hi(dim());
  for (int a = 0; a < dim(); ++a) {
    const double dxi = 2.0 * kPi * h / length(a);
    lo[a] = -dxi * double(n_[a] / 2);
    hi[a] = dxi * double(n_[a] - n_[a] / 2);
  }
  return GridSpec(lo, hi, n_);
}

bool GridSpec::operator==(const GridSpec& o) const {
  return n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_;
}

namespace {

VectorXcd reorder(const VectorXcd& v, const VectorXi& shape, bool to_fft) {
  const int d = static_cast<int>(shape.size());
  Index total = 1;
  for (int a = 0; a < d; ++a) total *= shape[a];
  VectorXcd out(total);
  VectorXi idx(d);
  for (Index f = 0; f < total; ++f) {
    Index rem = f, g = 0, stride = 1;
    for (int a = 0; a < d; ++a) {
      const Index n = shape[a];
      const Index i = rem % n;
      rem /= n;
      // natural slot m holds frequency m - n/2 which lives in bin (m - n/2) mod n
      const Index j = to_fft ? GridSpec::bin_of_freq(i - n / 2, n)
                             : (i + n / 2) % n;  // inverse mapping
      g += stride * j;
      stride *= n;
    }
    out[g] = v[f];
  }
  return out;
}

}  // namespace

VectorXcd natural_to_fft_order(const VectorXcd& v, const VectorXi& shape) {
  return reorder(v, shape, true);
}

VectorXcd fft_to_natural_order(const VectorXcd& v, const VectorXi& shape) {
  return reorder(v, shape, false);
}

}  // namespace sclab
