#include <boost/math/special_functions/bessel.hpp>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "spinwave/simd/kernels.hpp"

using namespace spinwave;
using namespace spinwave::simd;

namespace {

const KernelTable* vector_table() { return avx2_kernels(); }

simd::PositionsView view(const AtomicEnsemble& e) { return {e.xs(), e.ys(), e.zs()}; }

}  // namespace

TEST_CASE("scalar sincos is the libm reference") {
  std::vector<double> x{0.0, 1.0, -2.5, 1e3, 123456.789};
  std::vector<double> s(x.size()), c(x.size());
  scalar_kernels().sincos(x, s, c);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(s[i] == std::sin(x[i]));
    CHECK(c[i] == std::cos(x[i]));
  }
}

TEST_CASE("vector sincos matches scalar for every tail length") {
  const KernelTable* v = vector_table();
  if (!v) return;
  std::mt19937_64 rng(5);
  for (double range : {1.0, 10.0, 1e3, 1e5}) {
    std::uniform_real_distribution<double> u(-range, range);
    for (std::size_t n = 0; n <= 37; ++n) {
      std::vector<double> x(n), s1(n), c1(n), s2(n, 7.0), c2(n, 7.0);
      for (auto& xi : x) xi = u(rng);
      scalar_kernels().sincos(x, s1, c1);
      v->sincos(x, s2, c2);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(s1[i] - s2[i]) < 2e-16 * std::max(1.0, std::abs(x[i])));
        CHECK(std::abs(c1[i] - c2[i]) < 2e-16 * std::max(1.0, std::abs(x[i])));
      }
    }
  }
  // quadrant edges
  std::vector<double> edges;
  for (int q = -16; q <= 16; ++q)
    for (double d : {-1e-12, 0.0, 1e-12}) edges.push_back(q * std::numbers::pi / 4 + d);
  std::vector<double> s1(edges.size()), c1(edges.size()), s2(edges.size()), c2(edges.size());
  scalar_kernels().sincos(edges, s1, c1);
  v->sincos(edges, s2, c2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    CHECK(std::abs(s1[i] - s2[i]) < 1e-15);
    CHECK(std::abs(c1[i] - c2[i]) < 1e-15);
  }
}

TEST_CASE("vector phase factors and structure sums match scalar") {
  const KernelTable* v = vector_table();
  if (!v) return;
  std::mt19937_64 rng(9);
  for (std::size_t n : {1u, 3u, 4u, 5u, 511u, 512u, 513u, 2049u}) {
    const auto e = testing::random_cloud(n, 40.0, n);
    const Vec3 q = testing::random_direction(rng) * 1.7;
    std::vector<double> re1(n), im1(n), re2(n), im2(n);
    scalar_kernels().phase_factors(view(e), q, re1, im1);
    v->phase_factors(view(e), q, re2, im2);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(re1[i] - re2[i]) < 1e-13);
      CHECK(std::abs(im1[i] - im2[i]) < 1e-13);
    }
    const cplx s1 = scalar_kernels().structure_sum(view(e), q);
    const cplx s2 = v->structure_sum(view(e), q);
    CHECK(std::abs(s1 - s2) < 1e-12 * std::sqrt(static_cast<double>(n)) + 1e-13);
  }
}

TEST_CASE("structure sum equals the naive sum") {
  const auto e = testing::random_cloud(1000, 30.0, 1);
  const Vec3 q{0.3, -0.2, 0.9};
  cplx naive{};
  for (const auto& r : e.positions()) naive += std::polar(1.0, dot(q, r));
  CHECK(std::abs(kernels().structure_sum(view(e), q) - naive) < 1e-11);
}

TEST_CASE("pair kernel against spherical Bessel functions") {
  using boost::math::sph_bessel;
  using boost::math::sph_neumann;
  std::mt19937_64 rng(2);
  const Vec3 axis{0, 0, 1};
  for (double x : {1e-4, 0.01, 0.3, 0.49, 0.5, 0.51, 1.0, 3.7, 25.0, 400.0}) {
    const Vec3 d = testing::random_direction(rng);
    const auto v = pair_kernel(d * x, axis, true);
    const double c = d.z;
    const double f = 1.5 * ((1 - c * c) * sph_bessel(0, x) - (1 - 3 * c * c) * sph_bessel(1, x) / x);
    CHECK(v.f == doctest::Approx(f).epsilon(1e-12).scale(1.0));
    if (x >= kNearZone) {
      const double g =
          1.5 * ((1 - c * c) * sph_neumann(0, x) - (1 - 3 * c * c) * sph_neumann(1, x) / x);
      CHECK(v.g == doctest::Approx(g).epsilon(1e-10));
    } else {
      CHECK(v.g == 0.0);
    }
  }
  CHECK(pair_kernel({0, 0, 0}, axis, true).f == 1.0);
  // f -> 1 continuously at contact
  CHECK(pair_kernel({1e-9, 0, 0}, axis, false).f == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pair kernel sum: vector matches scalar, including special pairs") {
  const KernelTable* v = vector_table();
  if (!v) return;
  for (std::size_t n : {2u, 5u, 17u, 300u, 700u}) {
    auto r = testing::random_cloud(n, 8.0, 100 + n).positions();
    r[1] = r[0];                              // coincident
    if (n > 2) r[2] = r[0] + Vec3{2e-4, 0, 0};  // near zone
    if (n > 3) r[3] = r[0] + Vec3{0, 0.2, 0};   // series zone
    const auto e = testing::make_ensemble(r);
    for (bool dispersive : {false, true}) {
      const Vec3 k0p{0, 0, 1};
      const Vec3 axis{1, 0, 0};
      const PairSum a = scalar_kernels().pair_kernel_sum(view(e), k0p, axis, dispersive, 1);
      const PairSum b = v->pair_kernel_sum(view(e), k0p, axis, dispersive, 1);
      CHECK(std::abs(a.value.real() - b.value.real()) < 1e-12 * static_cast<double>(n));
      CHECK(std::abs(a.value.imag() - b.value.imag()) < 1e-9 * static_cast<double>(n));
      CHECK(a.near_zone == b.near_zone);
      CHECK(a.coincident == b.coincident);
      CHECK(a.coincident == 1);
      CHECK(a.near_zone == (n > 2 ? 3 : 1));
    }
  }
}

TEST_CASE("pair kernel sum is independent of the thread split") {
  const auto e = testing::random_cloud(400, 10.0, 4);
  const PairSum a = kernels().pair_kernel_sum(view(e), {0, 0, 1}, {1, 0, 0}, true, 1);
  const PairSum b = kernels().pair_kernel_sum(view(e), {0, 0, 1}, {1, 0, 0}, true, 3);
  CHECK(a.value == b.value);
}

TEST_CASE("runtime selection switches tables") {
  const Isa before = kernels().isa;
  CHECK(select(Isa::scalar));
  CHECK(kernels().isa == Isa::scalar);
  CHECK(select(Isa::avx2) == (avx2_kernels() != nullptr));
  select(before);
  CHECK(isa_name(Isa::avx2) == "avx2");
}
