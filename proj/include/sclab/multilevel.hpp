#pragma once

#include "sclab/phasespace.hpp"
#include "sclab/propagators.hpp"
#include "sclab/quantization.hpp"
#include "sclab/symbol.hpp"
#include "sclab/wavefield.hpp"

#include <memory>

namespace sclab::multilevel {

/// Traceless symmetric 2x2 potential V(x) = [[w1, w2], [w2, -w1]] over
/// x in R^xdim, with hand-coded Jacobian dw (2 x xdim).
struct MatrixPotential {
  int xdim = 2;
  double gap_floor = 1e-6;
  std::function<Eigen::Vector2d(const VectorXd&)> w;
  std::function<MatrixXd(const VectorXd&)> dw;  // rows: w components, cols: x

  Eigen::Matrix2d value(const VectorXd& x) const;
  double gap(const VectorXd& x) const { return 2.0 * w(x).norm(); }

  /// Linear conical model w(x) = x (xdim = 2).
  static MatrixPotential conical_linear();
  /// Gapped 1-D model w(x) = (base + amp*exp(-x^2), amp2 * x * exp(-x^2)).
  static MatrixPotential gapped_1d(double base, double amp, double amp2);
};

struct EigenStructure {
  double lambda_plus = 0.0, lambda_minus = 0.0;
  Eigen::Matrix2d proj_plus, proj_minus;
};

/// Eigenvalues +-|w| and smooth eigenprojectors 0.5 (Id +- V/|w|).
/// Throws when |w(x)| <= gap_floor (crossing proximity).
EigenStructure eigen_structure(const MatrixPotential& vp, const VectorXd& x);

/// Band Hamiltonian |xi|^2/2 + lambda_band(x) as a flow generator.
Hamiltonian band_hamiltonian(const MatrixPotential& vp, int band);

struct TransportFrame {
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  double time = 0.0;

  double orthogonality_defect() const {
    return (R.transpose() * R - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
  }
};

/// Parallel transport along the band trajectory from z0 over [0, t]:
/// dR/dt = F(Phi^t) R with F = [xi . grad Pi, Pi], R(0) = Id.
TransportFrame parallel_transport(const MatrixPotential& vp, int band, const PhasePoint& z0,
                                  double t, double ode_tol = 1e-10);

/// Landau-Zener transition rate exp(-pi |w|^2 / (h |dw xi|)).
/// Throws when dw(x) xi = 0 (tangential passage).
double lz_rate(const MatrixPotential& vp, const PhasePoint& z, double h);

struct HopState {
  PhasePoint z;
  int band = 1;  // +1 or -1
  double weight = 1.0;
  double phase = 0.0;  // accumulated action
};

using HopEnsemble = std::vector<HopState>;

enum class HoppingMode { splitting, monte_carlo };

struct HoppingOptions {
  HoppingMode mode = HoppingMode::splitting;
  double ode_tol = 1e-9;
  int max_branches = 4096;
  double prune_weight = 1e-10;
  std::uint64_t seed = 1;
};

/// Band transport with Landau-Zener branching on the hopping surface
/// {w . (dw xi) = 0}. Splitting mode branches deterministically with
/// weights (1-T, T); Monte Carlo mode jumps with probability T.
HopEnsemble hopping_simulate(const MatrixPotential& vp, const HopEnsemble& initial,
                             double t_final, double h, const HoppingOptions& opts = {});

/// Weighted ensemble average of a band-indexed observable.
double hopping_observable(const HopEnsemble& ensemble,
                          const std::function<double(const PhasePoint&, int)>& a);

// ---------------------------------------------------------------------------
// two-level grid dynamics (1-D and 2-D position space)
// ---------------------------------------------------------------------------

/// Two-component split-step propagator for ih dpsi/dt = -h^2/2 Lap psi + V(x) psi.
/// The potential exponential is evaluated in closed form per grid point.
class TwoLevelPropagator {
public:
  TwoLevelPropagator(const MatrixPotential& vp, GridSpec grid, double h, double dt);

  /// samples layout: component-major (comp 0 block, then comp 1 block)
  VectorXcd propagate(const VectorXcd& spinor, double t) const;

  /// Band populations <psi, Pi_(+/-)(x) psi> dV; near-crossing points are
  /// split evenly between the bands.
  Eigen::Vector2d band_populations(const VectorXcd& spinor) const;

  const GridSpec& grid() const { return grid_; }
  double dt() const { return dt_; }

private:
  const MatrixPotential* vp_;
  GridSpec grid_;
  double h_;
  double dt_;
  VectorXd kinetic_;  // fft order
  std::vector<Eigen::Vector2d> wvals_;
};

/// Spinor packet on band `band`: Gaussian packet times the band eigenvector
/// (smooth branch over the packet support).
VectorXcd band_packet_spinor(const MatrixPotential& vp, const GridSpec& grid, double h,
                             const PhasePoint& center, int band);

struct AdiabaticResult {
  double residual = 0.0;  // time-averaged Egorov defect (operator norm)
  int time_nodes = 0;
};

/// Time-averaged adiabatic observable test on a gapped 1-D potential:
/// || int theta(t) ( U(-t) Op(Pi a Pi) U(t) - Op(Pi L^t(R(-t) a R(-t)*) Pi) ) dt ||.
/// For a = a_s Pi the transport frames cancel against the projectors, so the
/// transported side reduces to (a_s o Phi_band^t) Pi(x); the trajectory
/// solves are cached on an h-independent lattice and shared across a ladder.
class AdiabaticBenchmark {
public:
  AdiabaticBenchmark(MatrixPotential vp, Symbol a_scalar, int band, double t_window,
                     int nodes, GridSpec grid, double h_finest);
  ~AdiabaticBenchmark();

  AdiabaticResult residual(double h);

private:
  MatrixPotential vp_;
  Symbol a_scalar_;
  int band_;
  double t_window_;
  int nodes_;
  GridSpec grid_;
  Hamiltonian band_ham_;
  std::vector<Eigen::Matrix2d> proj_;  // on the doubled grid
  std::vector<std::unique_ptr<propagators::SymbolTransportCache>> caches_;
};

AdiabaticResult adiabatic_egorov_check(const MatrixPotential& vp, const Symbol& a_scalar,
                                       int band, double t_window, int nodes,
                                       const GridSpec& grid, double h);

}  // namespace sclab::multilevel
