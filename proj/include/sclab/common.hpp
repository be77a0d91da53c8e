#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sclab {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Thrown when an adaptive integrator cannot continue; carries the last
/// time for which the solution is valid.
class IntegrationFailure : public std::runtime_error {
public:
  IntegrationFailure(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

private:
  double last_valid_time_;
};

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic counter-based RNG: the value at (seed, stream, index) does
/// not depend on call order or worker count.  splitmix64 finalizer.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (index + 1) +
                      0xbf58476d1ce4e5b9ULL * (stream_ + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two derived counters.
  double normal(std::uint64_t index) const {
    double u1 = uniform(2 * index);
    double u2 = uniform(2 * index + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

namespace detail {
inline int& thread_count_ref() {
  static int n = static_cast<int>(std::thread::hardware_concurrency());
  return n;
}
}  // namespace detail

/// Global worker count for parallel_for (1 = serial). Set once at startup.
inline void set_thread_count(int n) { detail::thread_count_ref() = n > 0 ? n : 1; }
inline int thread_count() { return detail::thread_count_ref(); }

/// Static-chunked parallel loop. Workers only write to disjoint output
/// slots, so results are identical for every thread count.
template <typename F>
void parallel_for(Index n, F&& body) {
  const int workers = std::min<Index>(thread_count(), n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body]() {
      const Index lo = n * w / workers;
      const Index hi = n * (w + 1) / workers;
      for (Index i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sclab
