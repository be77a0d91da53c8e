#pragma once

#include "sclab/wavefield.hpp"

namespace sclab::transforms {

struct FourierDiagnostics {
  double top_octave_fraction = 0.0;  // momentum mass with |xi| in the top octave
  bool aliasing_flag = false;        // set when that fraction exceeds 1%
};

/// h-Fourier transform (2 pi h)^{-d/2} int f(x) e^{-i x.xi/h} dx, sampled on
/// the induced momentum grid. Unitary on the grid to round-off.
WaveField h_fourier(const WaveField& f, FourierDiagnostics* diag = nullptr);

/// Inverse transform back onto the given position grid.
WaveField h_fourier_inverse(const WaveField& momentum_field, const GridSpec& xgrid);

struct WignerDiagnostics {
  double max_imag = 0.0;        // largest |Im| before the real part is taken
  double wrap_mass = 0.0;       // |psi|^2 mass outside the central half box
  bool truncation_flag = false; // set when the v-integral support wraps
};

/// Wigner transform of a 1-D field, evaluated on (x-grid) x (half-spaced
/// momentum grid).  Pass a default GridSpec to use the natural xi-grid;
/// any other grid is evaluated by direct summation.
PhaseSpaceField wigner(const WaveField& f, const GridSpec& xi_grid = GridSpec(),
                       WignerDiagnostics* diag = nullptr);

/// Marginals of a phase-space field: integrate out xi (resp. x).
VectorXd marginal_x(const PhaseSpaceField& w);
VectorXd marginal_xi(const PhaseSpaceField& w);

struct BargmannOptions {
  double coverage_tol = 1e-6;  // mass quantile defining the covered region
  double margin_sqrt_h = 6.0;  // inflation in units of sqrt(h)
  double max_spacing_sqrt_h = 0.5;  // z-grid spacing in units of sqrt(h)
};

struct BargmannDiagnostics {
  double mass_deficit = 0.0;  // 1 - |B f|^2 mass / |f|^2
  bool coverage_flag = false;
};

/// Bargmann transform B_h[f](z) = (2 pi h)^{-d/2} <f, g_z> of a 1-D field,
/// on an automatically fitted z-grid (or a caller-provided one).
PhaseSpaceField bargmann(const WaveField& f, const BargmannOptions& opts = {},
                         BargmannDiagnostics* diag = nullptr);
PhaseSpaceField bargmann_on(const WaveField& f, const GridSpec& qgrid, const GridSpec& pgrid,
                            BargmannDiagnostics* diag = nullptr);

/// Gaussian-packet superposition f = (2 pi h)^{-d/2} int B(z) g_z dz over the
/// field's z-grid, rendered on `xgrid`.
WaveField bargmann_synthesis(const PhaseSpaceField& B, const GridSpec& xgrid);

/// Husimi density |B_h f|^2.
PhaseSpaceField husimi(const WaveField& f, const BargmannOptions& opts = {});

struct Moments {
  VectorXd mean_x, mean_xi;  // per axis
  VectorXd dev_x, dev_xi;    // standard deviations
};

/// Means and deviations of position and momentum; requires |norm - 1| small.
Moments moments(const WaveField& f, double norm_tol = 1e-6);

/// Momentum mass at |xi| >= R.
double h_oscillation_tail(const WaveField& f, double R);

/// Semi-classical Sobolev norm sup over the ladder {0, 1, ..., floor(s), s}
/// of || <hD>^l f ||.
double sobolev_norm(const WaveField& f, double s);

}  // namespace sclab::transforms
