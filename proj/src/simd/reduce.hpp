#pragma once

#include <cstddef>
#include <vector>

#include "spinwave/simd/kernels.hpp"

namespace spinwave::simd::detail {

/// Atoms per block. Block totals are combined with pairwise_sum.
inline constexpr std::size_t kBlock = 512;

struct BlockAccumulator {
  std::vector<double> re;
  std::vector<double> im;
  void add(double r, double i) {
    re.push_back(r);
    im.push_back(i);
  }
  cplx total() const { return {pairwise_sum(re), pairwise_sum(im)}; }
};

}  // namespace spinwave::simd::detail
