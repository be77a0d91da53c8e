#pragma once

#include "sclab/phasespace.hpp"
#include "sclab/wavefield.hpp"

namespace sclab::wavepackets {

/// Complex symmetric d x d matrix with positive-definite imaginary part.
struct SiegelMatrix {
  MatrixXcd gamma;

  explicit SiegelMatrix(MatrixXcd g);
  static SiegelMatrix standard(int d);  // i * Id

  int dim() const { return static_cast<int>(gamma.rows()); }
  double symmetry_defect() const;
  double min_imag_eigenvalue() const;
  /// det^{1/4}(Im Gamma) via Cholesky.
  double quarter_det_imag() const;
};

/// Gaussian wave packet
///   amplitude * e^{i phase} h^{-d/4} c_Gamma
///     * exp( (i/2h) Gamma (x-q).(x-q) + (i/h) p.(x-q) ).
/// The phase accumulates the action integral over h together with the
/// branch-tracked metaplectic argument; it is stored unreduced.
struct GaussianPacket {
  PhasePoint z;
  SiegelMatrix gamma;
  double h = 1.0;
  double phase = 0.0;
  double amplitude = 1.0;

  GaussianPacket(PhasePoint z0, SiegelMatrix g, double hval)
      : z(std::move(z0)), gamma(std::move(g)), h(hval) {}

  static GaussianPacket standard(PhasePoint z0, double hval) {
    const int d = z0.dim();
    return GaussianPacket(std::move(z0), SiegelMatrix::standard(d), hval);
  }

  Complex evaluate(const VectorXd& x) const;
};

struct RenderOptions {
  double min_points_per_width = 8.0;  // grid points per sqrt(h)
  double containment_margin = 6.0;    // required margin in units of sqrt(h)
  bool validate = true;
};

/// Samples the packet on a grid. Throws if the grid does not resolve
/// sqrt(h) or does not contain the center with the required margin.
WaveField render(const GaussianPacket& pkt, const GridSpec& grid,
                 const RenderOptions& opts = {});

/// One thawed propagation step across a flow segment: center moves to the
/// flow endpoint, Gamma by the Moebius action of the Jacobian blocks, phase
/// by action/h minus half the (principal-branch) argument of det(A + B Gamma).
/// Throws when A + B Gamma is ill-conditioned (suggests splitting the step).
GaussianPacket thawed_step(const GaussianPacket& pkt, const FlowData& fd,
                           double max_condition = 1e12);

struct PacketPath {
  GaussianPacket packet;
  FlowData flow;             // over the whole interval
  double metaplectic_arg = 0.0;  // branch-tracked arg det(A + B Gamma_0)
};

/// Flow + thawed step over [s, t] with continuous metaplectic branch
/// tracking along the trajectory.
PacketPath propagate_packet(const Hamiltonian& ham, const GaussianPacket& pkt, double s,
                            double t, double ode_tol = 1e-11);

}  // namespace sclab::wavepackets
