#include "coord/kernels.hpp"

#include <atomic>

#include "coord/core.hpp"

namespace coord::kernels {

namespace {

std::atomic<int>& override_slot() {
  static std::atomic<int> slot{-1};
  return slot;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw Error("kernel input spans differ in length");
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

Isa detected_isa() {
  static const Isa best = [] {
    if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (isa_available(Isa::kNeon)) return Isa::kNeon;
    return Isa::kScalar;
  }();
  return best;
}

Isa active_isa() {
  const int forced = override_slot().load(std::memory_order_relaxed);
  return forced < 0 ? detected_isa() : static_cast<Isa>(forced);
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(std::string("kernel variant not available: ") + isa_name(isa));
  }
  override_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(std::string("kernel variant not available: ") + isa_name(isa));
  }
  switch (isa) {
    case Isa::kAvx2: return *detail::avx2_table();
    case Isa::kNeon: return *detail::neon_table();
    case Isa::kScalar: break;
  }
  return detail::scalar_table();
}

void sampled_mask(std::span<const double> values, std::span<const double> seeds,
                  double tau_star, std::span<std::uint8_t> out) {
  check_sizes(values.size(), seeds.size());
  check_sizes(values.size(), out.size());
  table(active_isa()).sampled_mask(values.data(), seeds.data(), tau_star, out.data(),
                                   values.size());
}

void pps_ranks(std::span<const double> values, std::span<const double> seeds,
               std::span<double> out) {
  check_sizes(values.size(), seeds.size());
  check_sizes(values.size(), out.size());
  table(active_isa()).pps_ranks(values.data(), seeds.data(), out.data(), values.size());
}

double weighted_square_sum(std::span<const double> widths, std::span<const double> values) {
  check_sizes(widths.size(), values.size());
  return table(active_isa()).weighted_square_sum(widths.data(), values.data(), widths.size());
}

Moments moments(std::span<const double> x) {
  return table(active_isa()).moments(x.data(), x.size());
}

}  // namespace coord::kernels
