#include "coord/kernels.hpp"

namespace coord::kernels::detail {

namespace {

void sampled_mask(const double* values, const double* seeds, double tau_star,
                  std::uint8_t* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double threshold = seeds[k] * tau_star;
    out[k] = values[k] >= threshold ? 1 : 0;
  }
}

void pps_ranks(const double* values, const double* seeds, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = values[k] / seeds[k];
}

double weighted_square_sum(const double* widths, const double* values, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += widths[k] * (values[k] * values[k]);
  return acc;
}

Moments moments(const double* x, std::size_t n) {
  Moments m;
  for (std::size_t k = 0; k < n; ++k) {
    m.sum += x[k];
    m.sum_sq += x[k] * x[k];
  }
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{sampled_mask, pps_ranks, weighted_square_sum, moments};
  return t;
}

}  // namespace coord::kernels::detail
