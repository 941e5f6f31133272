#pragma once

// Data-parallel inner loops used by the samplers and the analysis harness.
// Every kernel has a scalar reference; AVX2 (x86-64) and NEON (aarch64)
// variants are selected at runtime and must agree with the reference:
// comparisons and divisions bit-exactly, reductions to rounding.

#include <cstddef>
#include <cstdint>
#include <span>

namespace coord::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

const char* isa_name(Isa isa);

/// Whether the running CPU can execute the variant.
bool isa_available(Isa isa);

/// Best available variant on this CPU.
Isa detected_isa();

/// Variant used by the dispatching entry points below.
Isa active_isa();

/// Overrides dispatch (tests, benchmarks). Throws if unavailable.
void force_isa(Isa isa);

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct KernelTable {
  // out[k] = values[k] >= seeds[k] * tau_star
  void (*sampled_mask)(const double* values, const double* seeds, double tau_star,
                       std::uint8_t* out, std::size_t n);
  // out[k] = values[k] / seeds[k]
  void (*pps_ranks)(const double* values, const double* seeds, double* out,
                    std::size_t n);
  // sum_k widths[k] * values[k]^2
  double (*weighted_square_sum)(const double* widths, const double* values,
                                std::size_t n);
  Moments (*moments)(const double* x, std::size_t n);
};

/// Kernel table of one variant. Throws if the variant is not compiled in or
/// not supported by the CPU.
const KernelTable& table(Isa isa);

void sampled_mask(std::span<const double> values, std::span<const double> seeds,
                  double tau_star, std::span<std::uint8_t> out);
void pps_ranks(std::span<const double> values, std::span<const double> seeds,
               std::span<double> out);
double weighted_square_sum(std::span<const double> widths,
                           std::span<const double> values);
Moments moments(std::span<const double> x);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace coord::kernels
