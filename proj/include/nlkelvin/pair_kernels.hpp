#pragma once

// Low-level loops over pairs and cells. Every kernel exists twice: a plain
// serial reference and an OpenMP version. The OpenMP versions gather per cell
// through the adjacency lists instead of scattering per pair, so they are race
// free, and their reductions use fixed-size blocks summed in block order, so
// results are bit-identical for any thread count.

#include <cstddef>
#include <span>

namespace nlkelvin::kernels {

/// Flat view of a PairList.
struct PairTopology {
  std::span<const int> first;
  std::span<const int> second;
  std::span<const double> omega;
  std::span<const double> offset;  // stride 3
  std::span<const int> adj_ptr;
  std::span<const int> adj_pair;
  std::span<const signed char> adj_sign;
  int dim = 0;

  std::size_t num_pairs() const { return first.size(); }
  std::size_t num_cells() const { return adj_ptr.empty() ? 0 : adj_ptr.size() - 1; }
};

/// Compressed sparse rows.
struct CsrView {
  std::span<const int> row_ptr;
  std::span<const int> col;
  std::span<const double> val;
};

/// Block length of the deterministic reductions.
inline constexpr std::size_t kReductionBlock = 2048;

namespace serial {

/// out[p] = (u[i] - u[j]) * omega[p]
void gradient(const PairTopology& t, std::span<const double> u, std::span<double> out);
/// out[c] = scale * sum over pairs p containing c of sign * q[p] * omega[p]
void divergence(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out);
/// out[3c + a] = scale * sum over pairs p containing c of d_p[a] * q[p] * omega[p]
void recovery(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out);
/// out[p] = 0.5 * (v_i + v_j) . d_p * omega[p], with v strided by 3
void adjoint_recovery(const PairTopology& t, std::span<const double> v, std::span<double> out);
/// out[c] = scale * sum over pairs p containing c of weight[p] * q[p]^2
void row_energy(const PairTopology& t, std::span<const double> q, std::span<const double> weight, double scale,
                std::span<double> out);
void csr_matvec(const CsrView& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
/// sum_k a[k] * w[k] * b[k]
double weighted_dot(std::span<const double> a, std::span<const double> w, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace omp {

// Same contracts as the serial versions.
void gradient(const PairTopology& t, std::span<const double> u, std::span<double> out);
void divergence(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out);
void recovery(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out);
void adjoint_recovery(const PairTopology& t, std::span<const double> v, std::span<double> out);
void row_energy(const PairTopology& t, std::span<const double> q, std::span<const double> weight, double scale,
                std::span<double> out);
void csr_matvec(const CsrView& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> w, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace omp

/// Threads the OpenMP kernels will use (1 when built without OpenMP).
int max_threads();
/// Caps the worker threads; values < 1 are ignored.
void set_threads(int threads);
/// Applies the NLKELVIN_THREADS environment variable, if set. Returns the thread count in effect.
int configure_threads_from_env();

}  // namespace nlkelvin::kernels
