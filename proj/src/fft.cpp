#include "sclab/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace sclab::fft {

namespace {

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;  // caches plans per size
  return fft;
}

}  // namespace

void forward(VectorXcd& data) {
  const Index n = data.size();
  if (n == 1) return;
  VectorXcd out(n);
  engine().fwd(out.data(), data.data(), static_cast<int>(n));
  data.swap(out);
}

void inverse(VectorXcd& data) {
  // Unnormalized inverse via conj(forward(conj(x))); avoids depending on
  // the backend's inverse scaling convention.
  data = data.conjugate();
  forward(data);
  data = data.conjugate();
}

namespace {

template <bool Forward>
void transform_axis(VectorXcd& data, const VectorXi& shape, int axis) {
  const int d = static_cast<int>(shape.size());
  if (axis < 0 || axis >= d) throw DimensionError("fft: axis out of range");
  const Index n = shape[axis];
  if (n == 1) return;
  Index stride = 1;
  for (int a = 0; a < axis; ++a) stride *= shape[a];
  const Index total = data.size();
  const Index block = stride * n;  // one contiguous hyper-row group
  VectorXcd line(n);
  for (Index base = 0; base < total; base += block) {
    for (Index s = 0; s < stride; ++s) {
      for (Index k = 0; k < n; ++k) line[k] = data[base + s + k * stride];
      if constexpr (Forward)
        forward(line);
      else
        inverse(line);
      for (Index k = 0; k < n; ++k) data[base + s + k * stride] = line[k];
    }
  }
}

}  // namespace

void forward_axis(VectorXcd& data, const VectorXi& shape, int axis) {
  transform_axis<true>(data, shape, axis);
}

void inverse_axis(VectorXcd& data, const VectorXi& shape, int axis) {
  transform_axis<false>(data, shape, axis);
}

void forward_nd(VectorXcd& data, const VectorXi& shape) {
  for (int a = 0; a < shape.size(); ++a) forward_axis(data, shape, a);
}

void inverse_nd(VectorXcd& data, const VectorXi& shape) {
  for (int a = 0; a < shape.size(); ++a) inverse_axis(data, shape, a);
}

}  // namespace sclab::fft
