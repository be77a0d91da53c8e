#include "sclab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sclab::io {

namespace {

void put_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
std::int64_t get_i64(std::istream& is) {
  std::int64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void write_grid_header(std::ostream& os, const GridSpec& g, double h) {
  put_i64(os, g.dim());
  for (int a = 0; a < g.dim(); ++a) put_i64(os, g.count(a));
  for (int a = 0; a < g.dim(); ++a) {
    put_f64(os, g.lo()[a]);
    put_f64(os, g.hi()[a]);
  }
  put_f64(os, h);
}

GridSpec read_grid_header(std::istream& is, double& h) {
  const std::int64_t d = get_i64(is);
  VectorXi n(d);
  for (int a = 0; a < d; ++a) n[a] = static_cast<int>(get_i64(is));
  VectorXd lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = get_f64(is);
    hi[a] = get_f64(is);
  }
  h = get_f64(is);
  return GridSpec(lo, hi, n);
}

class AtomicFile {
public:
  AtomicFile(const std::string& path, std::ios::openmode mode)
      : path_(path), tmp_(path + ".tmp"), os_(tmp_, mode) {
    if (!os_) throw std::runtime_error("cannot open " + tmp_);
  }
  std::ostream& stream() { return os_; }
  void commit() {
    os_.close();
    std::filesystem::rename(tmp_, path_);
  }

private:
  std::string path_, tmp_;
  std::ofstream os_;
};

}  // namespace

void write_field(const std::string& path, const WaveField& f) {
  AtomicFile out(path, std::ios::binary);
  write_grid_header(out.stream(), f.grid, f.h);
  for (Index i = 0; i < f.samples.size(); ++i) {
    put_f64(out.stream(), f.samples[i].real());
    put_f64(out.stream(), f.samples[i].imag());
  }
  out.commit();
}

WaveField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  double h;
  const GridSpec g = read_grid_header(is, h);
  WaveField f(g, h);
  for (Index i = 0; i < f.samples.size(); ++i) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    f.samples[i] = Complex(re, im);
  }
  if (!is) throw std::runtime_error("truncated field file " + path);
  return f;
}

void write_phase_field(const std::string& path, const PhaseSpaceField& f) {
  AtomicFile out(path, std::ios::binary);
  write_grid_header(out.stream(), f.xgrid, f.h);
  write_grid_header(out.stream(), f.xigrid, f.h);
  for (Index i = 0; i < f.values.size(); ++i) {
    put_f64(out.stream(), f.values[i].real());
    put_f64(out.stream(), f.values[i].imag());
  }
  out.commit();
}

void write_operator(const std::string& path, const quantization::GridOperator& op) {
  AtomicFile out(path, std::ios::binary);
  put_i64(out.stream(), op.matrix.rows());
  put_i64(out.stream(), op.matrix.cols());
  put_f64(out.stream(), op.h);
  for (Index r = 0; r < op.matrix.rows(); ++r)
    for (Index c = 0; c < op.matrix.cols(); ++c) {
      put_f64(out.stream(), op.matrix(r, c).real());
      put_f64(out.stream(), op.matrix(r, c).imag());
    }
  out.commit();
}

void write_field_csv(const std::string& path, const WaveField& f) {
  if (f.grid.dim() != 1) throw DimensionError("write_field_csv: 1-D fields only");
  std::ostringstream os;
  os.precision(17);
  os << "x,re,im,abs2\n";
  for (Index i = 0; i < f.samples.size(); ++i)
    os << f.grid.point(0, i) << ',' << f.samples[i].real() << ',' << f.samples[i].imag()
       << ',' << std::norm(f.samples[i]) << '\n';
  write_text(path, os.str());
}

void write_spectrum_csv(const std::string& path, const VectorXd& evals) {
  std::ostringstream os;
  os.precision(17);
  os << "index,eigenvalue\n";
  for (Index i = 0; i < evals.size(); ++i) os << i << ',' << evals[i] << '\n';
  write_text(path, os.str());
}

void write_text(const std::string& path, const std::string& content) {
  AtomicFile out(path, std::ios::out);
  out.stream() << content;
  out.commit();
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace sclab::io
