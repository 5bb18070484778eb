#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "nlkelvin/pair_kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlkelvin::kernels {

namespace omp {

namespace {

using Index = std::ptrdiff_t;

template <typename BlockSum>
double blocked_sum(std::size_t n, BlockSum&& block_sum) {
  const Index blocks = static_cast<Index>((n + kReductionBlock - 1) / kReductionBlock);
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[b] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace

void gradient(const PairTopology& t, std::span<const double> u, std::span<double> out) {
  const Index n = static_cast<Index>(t.num_pairs());
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < n; ++p) out[p] = (u[t.first[p]] - u[t.second[p]]) * t.omega[p];
}

void divergence(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out) {
  const Index cells = static_cast<Index>(t.num_cells());
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < cells; ++c) {
    double s = 0.0;
    for (int k = t.adj_ptr[c]; k < t.adj_ptr[c + 1]; ++k) {
      const int p = t.adj_pair[k];
      s += t.adj_sign[k] * q[p] * t.omega[p];
    }
    out[c] = scale * s;
  }
}

void recovery(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out) {
  const Index cells = static_cast<Index>(t.num_cells());
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < cells; ++c) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int k = t.adj_ptr[c]; k < t.adj_ptr[c + 1]; ++k) {
      const int p = t.adj_pair[k];
      const double flow = q[p] * t.omega[p];
      s0 += t.offset[3 * p] * flow;
      s1 += t.offset[3 * p + 1] * flow;
      s2 += t.offset[3 * p + 2] * flow;
    }
    out[3 * c] = scale * s0;
    out[3 * c + 1] = scale * s1;
    out[3 * c + 2] = scale * s2;
  }
}

void adjoint_recovery(const PairTopology& t, std::span<const double> v, std::span<double> out) {
  const Index n = static_cast<Index>(t.num_pairs());
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < n; ++p) {
    const int i = t.first[p];
    const int j = t.second[p];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += 0.5 * (v[3 * i + a] + v[3 * j + a]) * t.offset[3 * p + a];
    out[p] = s * t.omega[p];
  }
}

void row_energy(const PairTopology& t, std::span<const double> q, std::span<const double> weight, double scale,
                std::span<double> out) {
  const Index cells = static_cast<Index>(t.num_cells());
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < cells; ++c) {
    double s = 0.0;
    for (int k = t.adj_ptr[c]; k < t.adj_ptr[c + 1]; ++k) {
      const int p = t.adj_pair[k];
      s += weight[p] * q[p] * q[p];
    }
    out[c] = scale * s;
  }
}

void csr_matvec(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const Index rows = static_cast<Index>(a.row_ptr.size()) - 1;
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k] * b[k];
    return s;
  });
}

double weighted_dot(std::span<const double> a, std::span<const double> w, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k] * w[k] * b[k];
    return s;
  });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const Index n = static_cast<Index>(x.size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("NLKELVIN_THREADS")) {
    try {
      set_threads(std::stoi(env));
    } catch (const std::exception&) {
      // non-numeric values leave the OpenMP default in place
    }
  }
  return max_threads();
}

}  // namespace nlkelvin::kernels
