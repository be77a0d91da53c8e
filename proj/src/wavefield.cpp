#include "sclab/wavefield.hpp"

namespace sclab {

WaveField::WaveField(GridSpec g, double hval)
    : grid(std::move(g)), h(hval), samples(VectorXcd::Zero(grid.size())) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("WaveField: h must be in (0, 1]");
}

WaveField::WaveField(GridSpec g, double hval, VectorXcd s)
    : grid(std::move(g)), h(hval), samples(std::move(s)) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("WaveField: h must be in (0, 1]");
  if (samples.size() != grid.size())
    throw DimensionError("WaveField: sample count does not match grid");
}

double WaveField::norm_sq() const { return samples.squaredNorm() * grid.cell_volume(); }

double WaveField::norm() const { return std::sqrt(norm_sq()); }

void WaveField::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::runtime_error("WaveField: cannot normalize zero field");
  samples /= n;
}

Complex WaveField::inner(const WaveField& other) const {
  if (!(grid == other.grid)) throw DimensionError("WaveField::inner: grid mismatch");
  return (other.samples.conjugate().cwiseProduct(samples)).sum() * grid.cell_volume();
}

double WaveField::boundary_ratio() const {
  const double peak = samples.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  const Index total = grid.size();
  for (Index f = 0; f < total; ++f) {
    const VectorXi idx = grid.unflat(f);
    bool on_edge = false;
    for (int a = 0; a < grid.dim(); ++a)
      if (idx[a] == 0 || idx[a] == grid.count(a) - 1) on_edge = true;
    if (on_edge) edge = std::max(edge, std::abs(samples[f]));
  }
  return edge / peak;
}

WaveField WaveField::from_profile(const GridSpec& g, double hval,
                                  const std::function<Complex(const VectorXd&)>& f) {
  WaveField out(g, hval);
  const Index total = g.size();
  VectorXd x(g.dim());
  for (Index fl = 0; fl < total; ++fl) {
    const VectorXi idx = g.unflat(fl);
    for (int a = 0; a < g.dim(); ++a) x[a] = g.point(a, idx[a]);
    out.samples[fl] = f(x);
  }
  return out;
}

double PhaseSpaceField::total_mass() const { return values.real().sum() * cell_volume(); }

double PhaseSpaceField::abs2_mass() const { return values.squaredNorm() * cell_volume(); }

}  // namespace sclab
