#include "fpml/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fpml {
namespace {

// The FFTW planner is not thread-safe; plan execution on the plan's own
// buffers is.  Each thread keeps its own plans and buffers, creation and
// destruction serialized by a global mutex.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanEntry {
  fftw_plan plan = nullptr;
  void* in = nullptr;  // fftw_malloc'd buffer the plan was created on
  std::size_t n = 0;
};

using PlanKey = std::tuple<int, int, int>;  // (kind, dim, size per axis)
constexpr int kDftForward = 0;
constexpr int kDftBackward = 1;
constexpr int kDst = 2;

class PlanCache {
public:
  ~PlanCache() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [key, e] : entries_) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.in);
    }
  }

  PlanEntry& get_dft(int dim, int m, int sign) {
    PlanKey key{sign < 0 ? kDftForward : kDftBackward, dim, m};
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    std::size_t n = dim == 1 ? static_cast<std::size_t>(m)
                             : static_cast<std::size_t>(m) * m;
    std::lock_guard<std::mutex> lock(planner_mutex());
    PlanEntry e;
    e.n = n;
    e.in = fftw_malloc(sizeof(fftw_complex) * n);
    auto* buf = static_cast<fftw_complex*>(e.in);
    int fsign = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
    e.plan = dim == 1 ? fftw_plan_dft_1d(m, buf, buf, fsign, FFTW_ESTIMATE)
                      : fftw_plan_dft_2d(m, m, buf, buf, fsign, FFTW_ESTIMATE);
    if (!e.plan) throw std::runtime_error("fftw plan creation failed");
    return entries_.emplace(key, e).first->second;
  }

  PlanEntry& get_dst(int dim, int n_per_axis) {
    PlanKey key{kDst, dim, n_per_axis};
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    std::size_t n = dim == 1 ? static_cast<std::size_t>(n_per_axis)
                             : static_cast<std::size_t>(n_per_axis) * n_per_axis;
    std::lock_guard<std::mutex> lock(planner_mutex());
    PlanEntry e;
    e.n = n;
    e.in = fftw_malloc(sizeof(double) * n);
    auto* buf = static_cast<double*>(e.in);
    e.plan = dim == 1
                 ? fftw_plan_r2r_1d(n_per_axis, buf, buf, FFTW_RODFT00, FFTW_ESTIMATE)
                 : fftw_plan_r2r_2d(n_per_axis, n_per_axis, buf, buf, FFTW_RODFT00,
                                    FFTW_RODFT00, FFTW_ESTIMATE);
    if (!e.plan) throw std::runtime_error("fftw plan creation failed");
    return entries_.emplace(key, e).first->second;
  }

private:
  std::map<PlanKey, PlanEntry> entries_;
};

PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

}  // namespace

void raw_dft(const Grid& g, std::complex<double>* data, int sign) {
  raw_dft_n(g.dim(), g.points_per_dim(), data, sign);
}

void raw_dft_n(int dim, int n_per_axis, std::complex<double>* data, int sign) {
  PlanEntry& e = cache().get_dft(dim, n_per_axis, sign);
  auto* buf = static_cast<fftw_complex*>(e.in);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  for (std::size_t i = 0; i < e.n; ++i) {
    buf[i][0] = d[i][0];
    buf[i][1] = d[i][1];
  }
  fftw_execute(e.plan);
  for (std::size_t i = 0; i < e.n; ++i) {
    d[i][0] = buf[i][0];
    d[i][1] = buf[i][1];
  }
}

void raw_dst(const Grid& g, double* data) {
  PlanEntry& e = cache().get_dst(g.dim(), g.nodes_per_dim());
  auto* buf = static_cast<double*>(e.in);
  for (std::size_t i = 0; i < e.n; ++i) buf[i] = data[i];
  fftw_execute(e.plan);
  for (std::size_t i = 0; i < e.n; ++i) data[i] = buf[i];
}

namespace {

// Phase (-1)^{k0+k1} translating between FFT bins (origin at node 0) and
// Fourier-series coefficients on [-L, L)^N (origin at x = -L).
double bin_phase(const Grid& g, std::size_t flat) {
  int m = g.points_per_dim();
  int ksum;
  if (g.dim() == 1) {
    ksum = g.freq_index(static_cast<int>(flat));
  } else {
    ksum = g.freq_index(static_cast<int>(flat) / m) +
           g.freq_index(static_cast<int>(flat) % m);
  }
  return (ksum & 1) ? -1.0 : 1.0;
}

}  // namespace

Spectrum forward_transform(const Field& u) {
  const Grid& g = u.grid();
  if (!u.all_finite()) throw std::invalid_argument("transform of non-finite field");
  if (g.boundary() == Boundary::DirichletBox) {
    std::vector<double> c(u.values());
    raw_dst(g, c.data());
    // RODFT00 yields 2 sum u_i sin(pi i k / M); orthogonality gives M/2 per axis.
    double scale = g.dim() == 1 ? 1.0 / g.points_per_dim()
                                : 1.0 / (static_cast<double>(g.points_per_dim()) *
                                         g.points_per_dim());
    for (double& v : c) v *= scale;
    return Spectrum::make_sine(g, std::move(c));
  }
  std::vector<std::complex<double>> c(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) c[i] = u[i];
  raw_dft(g, c.data(), -1);
  double scale = 1.0 / static_cast<double>(g.node_count());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= scale * bin_phase(g, i);
  return Spectrum::make_fourier(g, std::move(c));
}

Field inverse_transform(const Spectrum& s) {
  const Grid& g = s.grid();
  if (!s.is_fourier()) {
    std::vector<double> v(s.sine_coeffs());
    raw_dst(g, v.data());
    double scale = g.dim() == 1 ? 0.5 : 0.25;
    for (double& x : v) x *= scale;
    return Field(g, std::move(v));
  }
  std::vector<std::complex<double>> c(s.fourier_coeffs());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= bin_phase(g, i);
  raw_dft(g, c.data(), +1);
  Field out(g);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

}  // namespace fpml
