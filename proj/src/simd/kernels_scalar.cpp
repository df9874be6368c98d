// Scalar reference kernels. Everything else is tested against these.

#include <array>
#include <cmath>
#include <vector>

#include "reduce.hpp"
#include "spinwave/parallel.hpp"

namespace spinwave::simd {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace scalar {

void sincos(std::span<const double> x, std::span<double> s, std::span<double> c) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void phase_factors(PositionsView r, Vec3 q, std::span<double> re, std::span<double> im) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double phase = q.x * r.x[i] + q.y * r.y[i] + q.z * r.z[i];
    re[i] = std::cos(phase);
    im[i] = std::sin(phase);
  }
}

cplx structure_sum(PositionsView r, Vec3 q) {
  std::array<double, detail::kBlock> re{}, im{};
  detail::BlockAccumulator acc;
  for (std::size_t start = 0; start < r.size(); start += detail::kBlock) {
    const std::size_t len = std::min(detail::kBlock, r.size() - start);
    PositionsView block{r.x.subspan(start, len), r.y.subspan(start, len), r.z.subspan(start, len)};
    phase_factors(block, q, std::span(re).first(len), std::span(im).first(len));
    acc.add(pairwise_sum(std::span<const double>(re).first(len)),
            pairwise_sum(std::span<const double>(im).first(len)));
  }
  return acc.total();
}

PairSum pair_kernel_sum(PositionsView r, Vec3 k0p, Vec3 axis, bool dispersive, unsigned threads) {
  const std::size_t n = r.size();
  std::vector<double> row_re(n, 0.0), row_im(n, 0.0);
  std::vector<std::size_t> row_near(n, 0), row_coincident(n, 0);

  parallel_for(n, threads, [&](std::size_t mu) {
    std::array<double, detail::kBlock> bre{}, bim{};
    detail::BlockAccumulator acc;
    std::size_t fill = 0;
    const Vec3 rmu{r.x[mu], r.y[mu], r.z[mu]};
    for (std::size_t nu = mu + 1; nu < n; ++nu) {
      const Vec3 sep = rmu - Vec3{r.x[nu], r.y[nu], r.z[nu]};
      const PairKernelValue k = pair_kernel(sep, axis, dispersive);
      const double w = std::cos(dot(k0p, sep));
      const double x = norm(sep);
      if (x < kNearZone) ++row_near[mu];
      if (x == 0.0) ++row_coincident[mu];
      bre[fill] = k.f * w;
      bim[fill] = k.g * w;
      if (++fill == detail::kBlock) {
        acc.add(pairwise_sum(bre), pairwise_sum(bim));
        fill = 0;
      }
    }
    if (fill > 0)
      acc.add(pairwise_sum(std::span<const double>(bre).first(fill)),
              pairwise_sum(std::span<const double>(bim).first(fill)));
    const cplx t = acc.total();
    row_re[mu] = t.real();
    row_im[mu] = t.imag();
  });

  PairSum out;
  out.value = {pairwise_sum(row_re), pairwise_sum(row_im)};
  for (std::size_t mu = 0; mu < n; ++mu) {
    out.near_zone += row_near[mu];
    out.coincident += row_coincident[mu];
  }
  return out;
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, scalar::sincos, scalar::phase_factors,
                                 scalar::structure_sum, scalar::pair_kernel_sum};
  return table;
}

}  // namespace spinwave::simd
