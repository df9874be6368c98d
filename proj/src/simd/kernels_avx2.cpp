// AVX2/FMA kernels. Functions carry a target attribute instead of compiling
// the whole file with -mavx2, so nothing here leaks into code paths that run
// on CPUs without AVX2.

#include "spinwave/simd/kernels.hpp"

#if defined(SPINWAVE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))

#include <immintrin.h>

#include <array>
#include <numbers>
#include <vector>

#include "reduce.hpp"
#include "spinwave/parallel.hpp"

#define SPINWAVE_AVX2 __attribute__((target("avx2,fma")))

namespace spinwave::simd {

namespace {

// Cody-Waite split of pi/4 and minimax coefficients on [-pi/4, pi/4]
// (the Cephes double-precision set).
constexpr double kPio4A = 7.85398125648498535156e-1;
constexpr double kPio4B = 3.77489470793079817668e-8;
constexpr double kPio4C = 2.69515142907905952645e-15;
constexpr std::array<double, 6> kSinCoef = {
    1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
    -1.98412698295895385996e-4, 8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr std::array<double, 6> kCosCoef = {
    -1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
    2.48015872888517045348e-5,   -1.38888888888730564116e-3, 4.16666666666665929218e-2};

// Taylor coefficients in x^2 of j0(x) and j1(x)/x, highest order first.
constexpr std::array<double, 9> kJ0Series = [] {
  std::array<double, 9> c{};
  double fact = 1.0;  // (2k+1)!
  for (int k = 0; k < 9; ++k) {
    if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
    c[8 - k] = ((k % 2) ? -1.0 : 1.0) / fact;
  }
  return c;
}();
constexpr std::array<double, 9> kJ1xSeries = [] {
  std::array<double, 9> c{};
  double fact = 6.0;  // (2k+3)!
  for (int k = 0; k < 9; ++k) {
    if (k > 0) fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
    c[8 - k] = ((k % 2) ? -1.0 : 1.0) * (2.0 * k + 2.0) / fact;
  }
  return c;
}();

template <std::size_t M>
SPINWAVE_AVX2 inline __m256d horner(__m256d x, const std::array<double, M>& coef) {
  __m256d acc = _mm256_set1_pd(coef[0]);
  for (std::size_t i = 1; i < M; ++i) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(coef[i]));
  return acc;
}

SPINWAVE_AVX2 inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d sign_x = _mm256_and_pd(x, sign_bit);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);

  // Octant index, forced even so the reduced argument lies in [-pi/4, pi/4].
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(4.0 / std::numbers::pi)));
  const __m256d half_y = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
  const __m256d odd = _mm256_sub_pd(y, _mm256_add_pd(_mm256_floor_pd(half_y), _mm256_floor_pd(half_y)));
  y = _mm256_add_pd(y, odd);
  const __m256d eighth = _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)));
  const __m256d octant = _mm256_fnmadd_pd(eighth, _mm256_set1_pd(8.0), y);  // y mod 8 in {0,2,4,6}

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kPio4A), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kPio4B), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kPio4C), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  const __m256d poly_sin = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), horner(zz, kSinCoef), z);
  const __m256d poly_cos = _mm256_fmadd_pd(
      _mm256_mul_pd(zz, zz), horner(zz, kCosCoef),
      _mm256_fnmadd_pd(zz, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  const __m256d is2 = _mm256_cmp_pd(octant, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d is4 = _mm256_cmp_pd(octant, _mm256_set1_pd(4.0), _CMP_EQ_OQ);
  const __m256d is6 = _mm256_cmp_pd(octant, _mm256_set1_pd(6.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is2, is6);
  const __m256d flip_sin = _mm256_or_pd(is4, is6);
  const __m256d flip_cos = _mm256_or_pd(is2, is4);

  __m256d s = _mm256_blendv_pd(poly_sin, poly_cos, swap);
  __m256d c = _mm256_blendv_pd(poly_cos, poly_sin, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(flip_sin, sign_bit));
  s = _mm256_xor_pd(s, sign_x);
  c = _mm256_xor_pd(c, _mm256_and_pd(flip_cos, sign_bit));
  s_out = s;
  c_out = c;
}

SPINWAVE_AVX2 inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

SPINWAVE_AVX2 inline __m256i tail_mask(std::size_t remaining) {
  const __m256i idx = _mm256_set_epi64x(3, 2, 1, 0);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), idx);
}

SPINWAVE_AVX2 void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  std::size_t i = 0;
  __m256d vs, vc;
  for (; i + 4 <= x.size(); i += 4) {
    sincos_pd(_mm256_loadu_pd(x.data() + i), vs, vc);
    _mm256_storeu_pd(s.data() + i, vs);
    _mm256_storeu_pd(c.data() + i, vc);
  }
  if (i < x.size()) {
    const __m256i m = tail_mask(x.size() - i);
    sincos_pd(_mm256_maskload_pd(x.data() + i, m), vs, vc);
    _mm256_maskstore_pd(s.data() + i, m, vs);
    _mm256_maskstore_pd(c.data() + i, m, vc);
  }
}

SPINWAVE_AVX2 inline __m256d phase_of(const PositionsView& r, std::size_t i, __m256i m, Vec3 q) {
  const __m256d x = _mm256_maskload_pd(r.x.data() + i, m);
  const __m256d y = _mm256_maskload_pd(r.y.data() + i, m);
  const __m256d z = _mm256_maskload_pd(r.z.data() + i, m);
  __m256d ph = _mm256_mul_pd(_mm256_set1_pd(q.x), x);
  ph = _mm256_fmadd_pd(_mm256_set1_pd(q.y), y, ph);
  return _mm256_fmadd_pd(_mm256_set1_pd(q.z), z, ph);
}

SPINWAVE_AVX2 void phase_factors_avx2(PositionsView r, Vec3 q, std::span<double> re,
                                      std::span<double> im) {
  __m256d s, c;
  for (std::size_t i = 0; i < r.size(); i += 4) {
    const __m256i m = tail_mask(r.size() - i);
    sincos_pd(phase_of(r, i, m, q), s, c);
    _mm256_maskstore_pd(re.data() + i, m, c);
    _mm256_maskstore_pd(im.data() + i, m, s);
  }
}

SPINWAVE_AVX2 cplx structure_sum_avx2(PositionsView r, Vec3 q) {
  detail::BlockAccumulator acc;
  __m256d s, c;
  for (std::size_t start = 0; start < r.size(); start += detail::kBlock) {
    const std::size_t end = std::min(r.size(), start + detail::kBlock);
    __m256d sum_re = _mm256_setzero_pd();
    __m256d sum_im = _mm256_setzero_pd();
    for (std::size_t i = start; i < end; i += 4) {
      const __m256i m = tail_mask(end - i);
      sincos_pd(phase_of(r, i, m, q), s, c);
      const __m256d keep = _mm256_castsi256_pd(m);
      sum_re = _mm256_add_pd(sum_re, _mm256_and_pd(c, keep));
      sum_im = _mm256_add_pd(sum_im, _mm256_and_pd(s, keep));
    }
    acc.add(hsum(sum_re), hsum(sum_im));
  }
  return acc.total();
}

struct RowResult {
  double re = 0.0;
  double im = 0.0;
  std::size_t near_zone = 0;
  std::size_t coincident = 0;
};

SPINWAVE_AVX2 RowResult pair_row_avx2(const PositionsView& r, std::size_t mu, Vec3 k0p, Vec3 axis,
                                      bool dispersive) {
  const std::size_t n = r.size();
  const __m256d xm = _mm256_set1_pd(r.x[mu]);
  const __m256d ym = _mm256_set1_pd(r.y[mu]);
  const __m256d zm = _mm256_set1_pd(r.z[mu]);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d zero = _mm256_setzero_pd();

  detail::BlockAccumulator acc;
  RowResult row;
  __m256d sum_f = zero, sum_g = zero;
  std::size_t in_block = 0;

  for (std::size_t nu = mu + 1; nu < n; nu += 4) {
    const __m256i m = tail_mask(n - nu);
    const __m256d keep = _mm256_castsi256_pd(m);
    const __m256d dx = _mm256_sub_pd(xm, _mm256_maskload_pd(r.x.data() + nu, m));
    const __m256d dy = _mm256_sub_pd(ym, _mm256_maskload_pd(r.y.data() + nu, m));
    const __m256d dz = _mm256_sub_pd(zm, _mm256_maskload_pd(r.z.data() + nu, m));
    const __m256d r2 = _mm256_fmadd_pd(dz, dz, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
    const __m256d x = _mm256_sqrt_pd(r2);
    const __m256d proj = _mm256_fmadd_pd(
        _mm256_set1_pd(axis.z), dz,
        _mm256_fmadd_pd(_mm256_set1_pd(axis.y), dy, _mm256_mul_pd(_mm256_set1_pd(axis.x), dx)));
    const __m256d is_zero = _mm256_cmp_pd(r2, zero, _CMP_EQ_OQ);
    const __m256d c2 = _mm256_blendv_pd(_mm256_div_pd(_mm256_mul_pd(proj, proj), r2), zero, is_zero);
    const __m256d transverse = _mm256_sub_pd(one, c2);
    const __m256d longitudinal = _mm256_fnmadd_pd(three, c2, one);

    __m256d s, co;
    sincos_pd(x, s, co);
    const __m256d inv_x = _mm256_div_pd(one, x);
    const __m256d inv_x2 = _mm256_mul_pd(inv_x, inv_x);
    __m256d j0 = _mm256_mul_pd(s, inv_x);
    __m256d j1x = _mm256_mul_pd(_mm256_sub_pd(j0, co), inv_x2);
    const __m256d use_series = _mm256_cmp_pd(x, _mm256_set1_pd(kSeriesThreshold), _CMP_LT_OQ);
    if (_mm256_movemask_pd(use_series) != 0) {
      j0 = _mm256_blendv_pd(j0, horner(r2, kJ0Series), use_series);
      j1x = _mm256_blendv_pd(j1x, horner(r2, kJ1xSeries), use_series);
    }
    const __m256d f = _mm256_mul_pd(
        _mm256_set1_pd(1.5), _mm256_fmsub_pd(transverse, j0, _mm256_mul_pd(longitudinal, j1x)));

    const __m256d phase = _mm256_fmadd_pd(
        _mm256_set1_pd(k0p.z), dz,
        _mm256_fmadd_pd(_mm256_set1_pd(k0p.y), dy, _mm256_mul_pd(_mm256_set1_pd(k0p.x), dx)));
    __m256d ps, pc;
    sincos_pd(phase, ps, pc);

    const __m256d near = _mm256_and_pd(_mm256_cmp_pd(x, _mm256_set1_pd(kNearZone), _CMP_LT_OQ), keep);
    row.near_zone += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(near)));
    row.coincident += static_cast<std::size_t>(
        __builtin_popcount(_mm256_movemask_pd(_mm256_and_pd(is_zero, keep))));

    sum_f = _mm256_add_pd(sum_f, _mm256_and_pd(_mm256_mul_pd(f, pc), keep));
    if (dispersive) {
      const __m256d y0 = _mm256_mul_pd(_mm256_xor_pd(co, _mm256_set1_pd(-0.0)), inv_x);
      const __m256d y1x = _mm256_mul_pd(_mm256_sub_pd(y0, s), inv_x2);
      __m256d g = _mm256_mul_pd(_mm256_set1_pd(1.5),
                                _mm256_fmsub_pd(transverse, y0, _mm256_mul_pd(longitudinal, y1x)));
      g = _mm256_andnot_pd(near, g);
      sum_g = _mm256_add_pd(sum_g, _mm256_and_pd(_mm256_mul_pd(g, pc), keep));
    }
    in_block += 4;
    if (in_block >= detail::kBlock) {
      acc.add(hsum(sum_f), hsum(sum_g));
      sum_f = zero;
      sum_g = zero;
      in_block = 0;
    }
  }
  if (in_block > 0) acc.add(hsum(sum_f), hsum(sum_g));
  const cplx t = acc.total();
  row.re = t.real();
  row.im = t.imag();
  return row;
}

PairSum pair_kernel_sum_avx2(PositionsView r, Vec3 k0p, Vec3 axis, bool dispersive,
                             unsigned threads) {
  const std::size_t n = r.size();
  std::vector<RowResult> rows(n);
  parallel_for(n, threads, [&](std::size_t mu) { rows[mu] = pair_row_avx2(r, mu, k0p, axis, dispersive); });
  std::vector<double> re(n), im(n);
  PairSum out;
  for (std::size_t mu = 0; mu < n; ++mu) {
    re[mu] = rows[mu].re;
    im[mu] = rows[mu].im;
    out.near_zone += rows[mu].near_zone;
    out.coincident += rows[mu].coincident;
  }
  out.value = {pairwise_sum(re), pairwise_sum(im)};
  return out;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::avx2, sincos_avx2, phase_factors_avx2, structure_sum_avx2,
                                 pair_kernel_sum_avx2};
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &table : nullptr;
}

}  // namespace spinwave::simd

#else

namespace spinwave::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace spinwave::simd

#endif
