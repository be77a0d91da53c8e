#include "sclab/wavepackets.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace sclab::wavepackets {

SiegelMatrix::SiegelMatrix(MatrixXcd g) : gamma(std::move(g)) {
  if (gamma.rows() != gamma.cols()) throw DimensionError("SiegelMatrix: square matrix required");
  if (symmetry_defect() > 1e-12)
    throw std::invalid_argument("SiegelMatrix: matrix is not symmetric");
  if (min_imag_eigenvalue() <= 0.0)
    throw std::invalid_argument("SiegelMatrix: Im Gamma is not positive definite");
}

SiegelMatrix SiegelMatrix::standard(int d) {
  return SiegelMatrix(Complex(0.0, 1.0) * MatrixXcd::Identity(d, d));
}

double SiegelMatrix::symmetry_defect() const {
  return (gamma - gamma.transpose()).cwiseAbs().maxCoeff();
}

double SiegelMatrix::min_imag_eigenvalue() const {
  const MatrixXd im = gamma.imag();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (im + im.transpose()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double SiegelMatrix::quarter_det_imag() const {
  Eigen::LLT<MatrixXd> llt(gamma.imag());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("SiegelMatrix: Cholesky of Im Gamma failed");
  double sqrt_det = 1.0;  // prod of Cholesky diagonal = det^{1/2}
  for (int i = 0; i < dim(); ++i) sqrt_det *= llt.matrixL()(i, i);
  return std::sqrt(sqrt_det);
}

Complex GaussianPacket::evaluate(const VectorXd& x) const {
  const int d = z.dim();
  const VectorXd u = x - z.q;
  const VectorXcd uc = u.cast<Complex>();
  const Complex quad = uc.transpose() * gamma.gamma * uc;  // Gamma u . u, no conjugation
  const double c_gamma = std::pow(kPi, -0.25 * d) * gamma.quarter_det_imag();
  const Complex arg =
      Complex(0.0, 0.5 / h) * quad + Complex(0.0, 1.0 / h) * z.p.dot(u) + Complex(0.0, phase);
  return amplitude * std::pow(h, -0.25 * d) * c_gamma * std::exp(arg);
}

WaveField render(const GaussianPacket& pkt, const GridSpec& grid, const RenderOptions& opts) {
  const int d = pkt.z.dim();
  if (grid.dim() != d) throw DimensionError("render: grid dimension mismatch");
  const double rh = std::sqrt(pkt.h);
  if (opts.validate) {
    for (int a = 0; a < d; ++a) {
      if (grid.spacing(a) > rh / opts.min_points_per_width)
        throw std::invalid_argument("render: grid does not resolve sqrt(h)");
      const double margin = opts.containment_margin * rh;
      if (pkt.z.q[a] < grid.lo()[a] + margin || pkt.z.q[a] > grid.hi()[a] - margin)
        throw std::invalid_argument("render: packet center too close to the box edge");
    }
  }
  WaveField out(grid, pkt.h);
  const Index total = grid.size();
  VectorXd x(d);
  for (Index f = 0; f < total; ++f) {
    const VectorXi idx = grid.unflat(f);
    for (int a = 0; a < d; ++a) x[a] = grid.point(a, idx[a]);
    out.samples[f] = pkt.evaluate(x);
  }
  return out;
}

namespace {

Complex moebius_denominator_det(const SiegelMatrix& g, const FlowData& fd, MatrixXcd* m_out) {
  const MatrixXcd M = fd.A.cast<Complex>() + fd.B.cast<Complex>() * g.gamma;
  if (m_out) *m_out = M;
  return M.determinant();
}

}  // namespace

GaussianPacket thawed_step(const GaussianPacket& pkt, const FlowData& fd,
                           double max_condition) {
  MatrixXcd M;
  const Complex detM = moebius_denominator_det(pkt.gamma, fd, &M);
  Eigen::PartialPivLU<MatrixXcd> lu(M);
  // cheap condition estimate from the LU diagonal
  double dmax = 0.0, dmin = std::numeric_limits<double>::max();
  for (Index i = 0; i < M.rows(); ++i) {
    const double v = std::abs(lu.matrixLU()(i, i));
    dmax = std::max(dmax, v);
    dmin = std::min(dmin, v);
  }
  if (!(dmin > 0.0) || dmax / dmin > max_condition)
    throw std::runtime_error(
        "thawed_step: A + B Gamma is near-singular; split the time step");

  const MatrixXcd num = fd.C.cast<Complex>() + fd.D.cast<Complex>() * pkt.gamma.gamma;
  MatrixXcd g_new = num * lu.inverse();
  g_new = 0.5 * (g_new + g_new.transpose().eval());  // symmetrize round-off

  GaussianPacket out(fd.endpoint, SiegelMatrix(g_new), pkt.h);
  out.amplitude = pkt.amplitude;
  out.phase = pkt.phase + fd.action / pkt.h - 0.5 * std::arg(detM);
  return out;
}

PacketPath propagate_packet(const Hamiltonian& ham, const GaussianPacket& pkt, double s,
                            double t, double ode_tol) {
  double arg_acc = 0.0;
  Complex det_prev = 1.0;
  bool first = true;
  FlowObserver track = [&](const FlowData& fd) {
    const Complex det = moebius_denominator_det(pkt.gamma, fd, nullptr);
    if (first) {
      det_prev = det;
      first = false;
      return true;
    }
    arg_acc += std::arg(det / det_prev);
    det_prev = det;
    return true;
  };
  const FlowData fd = flow(ham, pkt.z, s, t, ode_tol, track);

  GaussianPacket stepped = thawed_step(pkt, fd);
  // replace the principal-branch argument by the branch-tracked one
  stepped.phase = pkt.phase + fd.action / pkt.h - 0.5 * arg_acc;

  PacketPath out{std::move(stepped), fd, arg_acc};
  return out;
}

}  // namespace sclab::wavepackets
