#include "nlkelvin/pair_kernels.hpp"

#include <algorithm>

namespace nlkelvin::kernels::serial {

void gradient(const PairTopology& t, std::span<const double> u, std::span<double> out) {
  for (std::size_t p = 0; p < t.num_pairs(); ++p) out[p] = (u[t.first[p]] - u[t.second[p]]) * t.omega[p];
}

void divergence(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t p = 0; p < t.num_pairs(); ++p) {
    const double flow = q[p] * t.omega[p];
    out[t.first[p]] += flow;
    out[t.second[p]] -= flow;
  }
  for (double& v : out) v *= scale;
}

void recovery(const PairTopology& t, std::span<const double> q, double scale, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t p = 0; p < t.num_pairs(); ++p) {
    const double flow = q[p] * t.omega[p];
    for (int a = 0; a < 3; ++a) {
      const double contrib = t.offset[3 * p + a] * flow;
      out[3 * t.first[p] + a] += contrib;
      out[3 * t.second[p] + a] += contrib;
    }
  }
  for (double& v : out) v *= scale;
}

void adjoint_recovery(const PairTopology& t, std::span<const double> v, std::span<double> out) {
  for (std::size_t p = 0; p < t.num_pairs(); ++p) {
    const int i = t.first[p];
    const int j = t.second[p];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += 0.5 * (v[3 * i + a] + v[3 * j + a]) * t.offset[3 * p + a];
    out[p] = s * t.omega[p];
  }
}

void row_energy(const PairTopology& t, std::span<const double> q, std::span<const double> weight, double scale,
                std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t p = 0; p < t.num_pairs(); ++p) {
    const double e = weight[p] * q[p] * q[p];
    out[t.first[p]] += e;
    out[t.second[p]] += e;
  }
  for (double& v : out) v *= scale;
}

void csr_matvec(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double weighted_dot(std::span<const double> a, std::span<const double> w, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * w[k] * b[k];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace nlkelvin::kernels::serial
