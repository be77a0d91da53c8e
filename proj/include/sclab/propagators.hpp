#pragma once

#include "sclab/phasespace.hpp"
#include "sclab/quantization.hpp"
#include "sclab/transforms.hpp"
#include "sclab/wavepackets.hpp"

#include <map>

namespace sclab::propagators {

/// Split-step Fourier propagator for p = |xi|^2/2 + V(x) on a periodic
/// grid (any dimension). One Strang step is unitary to round-off.
class SplitStepPropagator {
public:
  SplitStepPropagator(GridSpec grid, double h, VectorXd potential, double dt);

  /// Largest admissible step: kinetic phase per step <= pi/4 at the band edge.
  static double max_step(const GridSpec& grid, double h);

  WaveField propagate(const WaveField& psi0, double t) const;
  double dt() const { return dt_; }

private:
  GridSpec grid_;
  double h_;
  VectorXd potential_;
  double dt_;
  VectorXd kinetic_;  // |xi|^2/2 in fft order
};

/// Exact propagator of a Hermitian grid operator via eigendecomposition:
/// U(t) = V e^{-i E t / h} V^dagger. No time-step error.
class EigenPropagator {
public:
  explicit EigenPropagator(const quantization::GridOperator& H);

  MatrixXcd unitary(double t) const;
  WaveField propagate(const WaveField& psi0, double t) const;
  const VectorXd& eigenvalues() const { return evals_; }
  const MatrixXcd& eigenvectors() const { return evecs_; }
  double h() const { return h_; }

private:
  GridSpec grid_;
  double h_;
  int ncomp_;
  VectorXd evals_;
  MatrixXcd evecs_;
};

struct FioOptions {
  double spacing_sqrt_h = 0.5;    // z-grid spacing in units of sqrt(h)
  double margin_sqrt_h = 6.0;     // coverage margin
  double coverage_tol = 1e-6;     // Husimi mass quantile to cover
  double weight_cutoff = 1e-9;    // skip samples below this relative weight
  double ode_tol = 1e-11;
  double max_branch_jump = 0.5 * kPi;  // prefactor continuity guard per step
};

struct FioReport {
  Index samples = 0;
  double coverage_deficit = 0.0;
  double max_branch_step = 0.0;  // largest prefactor argument jump seen
};

/// Thawed Gaussian propagator: superposition of flow-transported packets
/// with Moebius-evolved covariances.
WaveField thawed_fio_apply(const Hamiltonian& ham, const WaveField& psi0, double t,
                           const FioOptions& opts = {}, FioReport* report = nullptr);

/// Frozen Gaussian (Herman-Kluk) propagator: fixed standard covariance with
/// the branch-tracked half-power determinant prefactor.
WaveField frozen_fio_apply(const Hamiltonian& ham, const WaveField& psi0, double t,
                           const FioOptions& opts = {}, FioReport* report = nullptr);

/// Herman-Kluk prefactor along one trajectory, branch-tracked from k(0) = 1.
Complex hk_prefactor(const FlowData& fd, double tracked_arg);

/// Shared table of flow-transported symbol values a(Phi^{t,s}(x, xi)),
/// evaluated lazily at doubled-grid midpoints x and momentum-grid points xi.
/// Entries are keyed on an h-independent integer lattice so a ladder of h
/// values reuses one set of trajectory solves.
class SymbolTransportCache {
public:
  SymbolTransportCache(const Hamiltonian& ham, const Symbol& a, double s, double t,
                       const GridSpec& xgrid, double h_finest, double ode_tol = 1e-11);

  /// Transported symbol value at doubled-grid midpoint index tau and
  /// momentum xi (must lie on the lattice of the finest grid).
  double value(Index tau, double xi);

  /// Pre-solve all lattice nodes needed for one h (parallel).
  void prepare(double h);

  const Hamiltonian& ham() const { return *ham_; }
  double s() const { return s_; }
  double t() const { return t_; }

private:
  double solve_node(Index tau, double xi) const;
  Index xi_key(double xi) const;

  const Hamiltonian* ham_;
  const Symbol* a_;
  double s_, t_;
  GridSpec xgrid_;
  double dxi_fine_;
  double ode_tol_;
  // support prefilter: bounding box of the backward image of supp(a)
  double x_lo_ = 0, x_hi_ = 0, xi_lo_ = 0, xi_hi_ = 0;
  std::map<std::pair<Index, Index>, double> values_;
};

struct EgorovResult {
  quantization::GridOperator conjugated;
  quantization::GridOperator transported;
  double residual = 0.0;
};

/// Heisenberg-evolved observable against the quantized flow-transported
/// symbol. `p_sym` must be the Weyl symbol of the generating Hamiltonian.
EgorovResult egorov_evolve(const Symbol& p_sym, const Hamiltonian& ham, const Symbol& a,
                           double s, double t, const GridSpec& grid, double h,
                           SymbolTransportCache* cache = nullptr);

/// Weyl symbols of the built-in Hamiltonian families (exact polynomials).
Symbol hamiltonian_weyl_symbol(const std::string& name);

struct PushforwardResult {
  double discrepancy = 0.0;  // sliced mass-weighted transport distance
  VectorXd husimi_peak;      // (q, p) location of the evolved Husimi maximum
};

/// Compares the Husimi density of the propagated field with the classical
/// pushforward of the initial Husimi density (sample-cloud transport).
PushforwardResult measure_pushforward_check(const Hamiltonian& ham, const VectorXd& potential,
                                            const WaveField& psi0, double t, double dt);

struct EigenfunctionReport {
  std::vector<double> eigenvalues;     // selected near the target energy
  std::vector<double> shell_fractions; // Husimi mass within delta of the shell
};

/// Eigensolves Op_h(xi^2 + V) and reports, for eigenfunctions with
/// eigenvalue near E, the Husimi mass within distance delta of the energy
/// shell {xi^2 + V = E}.
EigenfunctionReport eigenfunction_diagnostics(const VectorXd& potential_values,
                                              const std::function<double(double)>& potential,
                                              const GridSpec& grid, double h, double energy,
                                              double delta, double window);

}  // namespace sclab::propagators
