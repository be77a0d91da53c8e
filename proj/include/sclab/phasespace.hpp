#pragma once

#include "sclab/common.hpp"
#include "sclab/ode.hpp"

#include <optional>
#include <vector>

namespace sclab {

/// A point z = (q, p) of phase space.
struct PhasePoint {
  VectorXd q;
  VectorXd p;

  int dim() const { return static_cast<int>(q.size()); }

  static PhasePoint make(std::initializer_list<double> qs, std::initializer_list<double> ps) {
    PhasePoint z;
    z.q = Eigen::Map<const VectorXd>(std::data(qs), Index(qs.size()));
    z.p = Eigen::Map<const VectorXd>(std::data(ps), Index(ps.size()));
    return z;
  }

  VectorXd joint() const {
    VectorXd v(2 * dim());
    v.head(dim()) = q;
    v.tail(dim()) = p;
    return v;
  }
};

/// The standard symplectic matrix J = [[0, I], [-I, 0]] on R^{2d}.
MatrixXd symplectic_matrix(int d);

/// omega(z, z') = Jz . z'.
double symplectic_form(const PhasePoint& z, const PhasePoint& w);

/// Smooth (possibly time-dependent) Hamiltonian with hand-coded first and
/// second derivatives. Gradient/Hessian are in the joint variable (q, p).
struct Hamiltonian {
  std::string name;
  std::function<double(double, const PhasePoint&)> value;
  std::function<VectorXd(double, const PhasePoint&)> gradient;
  std::function<MatrixXd(double, const PhasePoint&)> hessian;
  /// Recorded sub-quadratic derivative bounds, not enforced at runtime.
  std::optional<double> subquadratic_bound;

  struct PolyTerm {
    double coeff;
    int qpow;
    int ppow;
  };

  static Hamiltonian free_particle(int d);
  static Hamiltonian harmonic(int d, double omega = 1.0);
  static Hamiltonian quartic(int d);
  static Hamiltonian cosine(int d, double v0, double period);
  static Hamiltonian polynomial_1d(const std::vector<PolyTerm>& terms);
};

/// J grad p: the right-hand side of Hamilton's equations.
VectorXd hamiltonian_vector_field(const Hamiltonian& ham, double t, const PhasePoint& z);

/// Endpoint, Jacobian blocks and accumulated action of a flow segment.
struct FlowData {
  PhasePoint endpoint;
  MatrixXd A, B, C, D;  // blocks of dPhi^{t,s}
  double action = 0.0;
  double s = 0.0, t = 0.0;

  MatrixXd jacobian() const;
  /// max-norm of F^T J F - J.
  double symplectic_defect() const;
};

using FlowObserver = std::function<bool(const FlowData&)>;

/// Integrates the trajectory, the linearized flow and the action integral
/// as one extended system with a shared adaptive error control. The
/// observer (if given) fires at every accepted step.
FlowData flow(const Hamiltonian& ham, const PhasePoint& z0, double s, double t,
              double tol = 1e-10, const FlowObserver& observer = nullptr);

}  // namespace sclab
