#pragma once

#include "sclab/common.hpp"

namespace sclab::fft {

/// In-place unnormalized forward DFT, X_k = sum_j x_j e^{-2pi i jk/n}.
void forward(VectorXcd& data);
/// In-place unnormalized inverse DFT (forward with conjugated twiddles,
/// no 1/n factor).
void inverse(VectorXcd& data);

/// Transform along one axis of a flattened multi-dimensional array with
/// axis-0 fastest ordering; `shape` gives the per-axis sample counts.
void forward_axis(VectorXcd& data, const VectorXi& shape, int axis);
void inverse_axis(VectorXcd& data, const VectorXi& shape, int axis);

/// Full multi-dimensional transforms (all axes).
void forward_nd(VectorXcd& data, const VectorXi& shape);
void inverse_nd(VectorXcd& data, const VectorXi& shape);

}  // namespace sclab::fft
