#pragma once

#include "sclab/grid.hpp"

namespace sclab {

/// Complex samples of a wave function on a uniform periodic grid, together
/// with the semi-classical parameter h.
struct WaveField {
  GridSpec grid;
  double h = 1.0;
  VectorXcd samples;  // flattened, axis 0 fastest

  WaveField() = default;
  WaveField(GridSpec g, double hval);
  WaveField(GridSpec g, double hval, VectorXcd s);

  double norm() const;     // sqrt(sum |psi|^2 dV)
  double norm_sq() const;  // sum |psi|^2 dV
  void normalize();

  Complex inner(const WaveField& other) const;  // <this, other> = sum this conj(other) dV

  /// max |psi| over the outermost grid layer divided by max |psi|.
  double boundary_ratio() const;
  bool boundary_negligible(double tol = 1e-8) const { return boundary_ratio() <= tol; }

  /// Builds a field from an analytic profile evaluated at the grid points.
  static WaveField from_profile(const GridSpec& g, double hval,
                                const std::function<Complex(const VectorXd&)>& f);
};

/// Real or complex values on a phase-space product grid (x-grid) x (xi-grid).
/// Storage is flattened with the x index fastest.
struct PhaseSpaceField {
  GridSpec xgrid;
  GridSpec xigrid;
  double h = 1.0;
  VectorXcd values;

  Index flat(Index ix, Index ixi) const { return ix + xgrid.size() * ixi; }
  double cell_volume() const { return xgrid.cell_volume() * xigrid.cell_volume(); }
  double total_mass() const;  // sum Re(values) dz
  double abs2_mass() const;   // sum |values|^2 dz
};

}  // namespace sclab
