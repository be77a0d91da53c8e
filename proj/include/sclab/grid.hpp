#pragma once

#include "sclab/common.hpp"

namespace sclab {

/// Uniform periodic grid on a box: axis j samples x = lo[j] + i*dx[j],
/// i = 0..n[j]-1, with the endpoint hi[j] identified with lo[j].
/// Sample counts are powers of two.
class GridSpec {
public:
  GridSpec() = default;
  GridSpec(VectorXd lo, VectorXd hi, VectorXi n);

  static GridSpec line(double a, double b, Index n);
  static GridSpec square(double a, double b, Index n);

  int dim() const { return static_cast<int>(n_.size()); }
  Index size() const;  // total number of samples
  const VectorXd& lo() const { return lo_; }
  const VectorXd& hi() const { return hi_; }
  const VectorXi& counts() const { return n_; }
  Index count(int axis) const { return n_[axis]; }
  double length(int axis) const { return hi_[axis] - lo_[axis]; }
  double spacing(int axis) const { return length(axis) / double(n_[axis]); }
  double cell_volume() const;

  double point(int axis, Index i) const { return lo_[axis] + spacing(axis) * double(i); }
  VectorXd axis_points(int axis) const;

  /// Flattened storage has axis 0 fastest.
  Index flat(const VectorXi& idx) const;
  VectorXi unflat(Index flat) const;

  /// Frequency grid of the h-Fourier transform: axis spacing 2*pi*h/L,
  /// n points centered on zero (band [-pi h n/L, pi h n/L)).
  GridSpec momentum_grid(double h) const;

  /// Signed frequency index for natural (ascending) storage slot m.
  static Index freq_of_slot(Index m, Index n) { return m - n / 2; }
  /// FFT bin holding signed frequency s.
  static Index bin_of_freq(Index s, Index n) { return (s % n + n) % n; }

  bool operator==(const GridSpec& o) const;

private:
  VectorXd lo_, hi_;
  VectorXi n_;
};

/// Reorder a flattened array between natural (ascending frequency) order
/// and FFT bin order along every axis.
VectorXcd natural_to_fft_order(const VectorXcd& v, const VectorXi& shape);
VectorXcd fft_to_natural_order(const VectorXcd& v, const VectorXi& shape);

}  // namespace sclab
