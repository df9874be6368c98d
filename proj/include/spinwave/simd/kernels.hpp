#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference variant and,
// when the CPU supports it, an AVX2/FMA variant. The variant is picked once at
// startup (override with SPINWAVE_SIMD=scalar|avx2) and the two are
// equivalence-tested against each other.

#include <cstddef>
#include <span>
#include <string_view>

#include "spinwave/simd/pair_kernel.hpp"
#include "spinwave/vec3.hpp"

namespace spinwave::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct PositionsView {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> z;
  std::size_t size() const { return x.size(); }
};

struct PairSum {
  cplx value;                   // sum over mu < nu of K(r_mu - r_nu) cos(k'0 . r_mu nu)
  std::size_t near_zone = 0;    // pairs with k r < kNearZone (dispersive part dropped)
  std::size_t coincident = 0;   // pairs with r == 0
};

struct KernelTable {
  Isa isa;
  /// s[i], c[i] = sin(x[i]), cos(x[i])
  void (*sincos)(std::span<const double> x, std::span<double> s, std::span<double> c);
  /// out = e^{i q . r_mu} for every atom
  void (*phase_factors)(PositionsView r, Vec3 q, std::span<double> re, std::span<double> im);
  /// sum_mu e^{i q . r_mu}, fixed-order blocked reduction
  cplx (*structure_sum)(PositionsView r, Vec3 q);
  /// Pair radiation kernel summed over unordered pairs with the phase-matching
  /// weight. `dispersive` adds i*g to f. Work is split over `threads`, the
  /// reduction order does not depend on the split.
  PairSum (*pair_kernel_sum)(PositionsView r, Vec3 k0p, Vec3 axis, bool dispersive,
                             unsigned threads);
};

const KernelTable& scalar_kernels();
/// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();
/// Runtime-selected table.
const KernelTable& kernels();
/// Force a variant (tests and benchmarking). Returns false if unavailable.
bool select(Isa isa);

/// Deterministic pairwise sum.
double pairwise_sum(std::span<const double> values);

}  // namespace spinwave::simd
