#include "spinwave/dicke.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spinwave/error.hpp"
#include "spinwave/simd/kernels.hpp"

namespace spinwave::dicke {

namespace {

simd::PositionsView view(const AtomicEnsemble& e) { return {e.xs(), e.ys(), e.zs()}; }

cplx phase(const Vec3& q, const Vec3& r) {
  const double p = dot(q, r);
  return {std::cos(p), std::sin(p)};
}

double helmert_norm(std::uint64_t ell) {
  const double l = static_cast<double>(ell);
  return std::sqrt(l * (l + 1.0));
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step; guard the product.
    const std::uint64_t m = n - k + i;
    const std::uint64_t g = std::gcd(r, i);
    const std::uint64_t r1 = r / g;
    const std::uint64_t m1 = m / (i / g);
    if (r1 > std::numeric_limits<std::uint64_t>::max() / m1)
      throw InvalidArgument("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                            ") overflows 64 bits");
    r = r1 * m1;
  }
  return r;
}

std::uint64_t rank_tuple(std::span<const std::uint32_t> tuple) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0 && tuple[i] <= tuple[i - 1])
      throw InvalidArgument("tuple is not strictly increasing");
    r += binomial(tuple[i], i + 1);
  }
  return r;
}

Tuple unrank_tuple(std::uint64_t rank, unsigned n, std::size_t atoms) {
  if (n == 0 || n > atoms) throw InvalidArgument("tuple size must be in [1, N]");
  if (rank >= binomial(atoms, n))
    throw InvalidArgument("tuple rank " + std::to_string(rank) + " out of range");
  Tuple t(n);
  std::uint64_t c = atoms;
  for (unsigned i = n; i >= 1; --i) {
    // largest c with binom(c, i) <= rank
    --c;
    while (binomial(c, i) > rank) --c;
    t[i - 1] = static_cast<std::uint32_t>(c);
    rank -= binomial(c, i);
  }
  return t;
}

bool next_tuple(Tuple& t, std::size_t atoms) {
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t limit = i + 1 < n ? t[i + 1] : atoms;
    if (t[i] + 1 < limit) {
      ++t[i];
      for (std::size_t j = 0; j < i; ++j) t[j] = static_cast<std::uint32_t>(j);
      return true;
    }
  }
  return false;
}

Couplings::Couplings(const AtomicEnsemble& ensemble, WaveVector k0p)
    : ensemble_(&ensemble), k0p_(k0p) {
  if (ensemble.size() == 0) throw InvalidArgument("empty ensemble");
}

std::uint64_t Couplings::basis_size(unsigned n) const {
  if (n > ensemble_->size())
    throw InvalidArgument("excitation number " + std::to_string(n) + " exceeds N");
  return binomial(ensemble_->size(), n);
}

cplx Couplings::s_function(unsigned n, std::uint64_t ell, std::uint64_t j, DeltaK dk) const {
  if (n == 0) throw InvalidArgument("S function needs n >= 1");
  if (ell == 0 || ell >= basis_size(n))
    throw InvalidArgument("S function label ell out of range");
  if (j >= ell) throw InvalidArgument("S function needs j < ell");
  const auto& r = ensemble_->positions();
  const Tuple tj = unrank_tuple(j, n, r.size());
  const Tuple tl = unrank_tuple(ell, n, r.size());
  cplx s{};
  for (unsigned i = 0; i < n; ++i) s += phase(dk, r[tj[i]]) - phase(dk, r[tl[i]]);
  return s;
}

cplx Couplings::s_sum(unsigned n, std::uint64_t ell, DeltaK dk) const {
  if (n == 0) throw InvalidArgument("S function needs n >= 1");
  if (ell == 0 || ell >= basis_size(n))
    throw InvalidArgument("S function label ell out of range");
  const auto& r = ensemble_->positions();
  // sum_{j<ell} T_j - ell T_ell with T_gamma = sum_{s in gamma} e^{i dk.r_s}
  cplx below{};
  Tuple t(n);
  for (unsigned i = 0; i < n; ++i) t[i] = i;
  for (std::uint64_t j = 0; j < ell; ++j) {
    for (auto a : t) below += phase(dk, r[a]);
    next_tuple(t, r.size());
  }
  cplx last{};
  for (auto a : t) last += phase(dk, r[a]);
  return below - static_cast<double>(ell) * last;
}

cplx Couplings::v_nn(unsigned n, std::uint64_t ell, std::uint64_t ell_prime, const WaveVector& k,
                     SumMode mode) const {
  const std::uint64_t dim = basis_size(n);
  if (n == 0) throw InvalidArgument("v_nn needs n >= 1");
  if (ell != 0 && ell_prime != 0)
    throw InvalidArgument("v_nn is available for (0,0), (0,ell) and (ell,0) only");
  if (ell >= dim || ell_prime >= dim) throw InvalidArgument("v_nn label out of range");
  const double N = static_cast<double>(ensemble_->size());
  const Vec3 q = k0p_.components() - k.components();

  if (ell == 0 && ell_prime == 0) {
    if (mode == SumMode::double_sum) {
      const auto& r = ensemble_->positions();
      cplx s{};
      for (const auto& a : r)
        for (const auto& b : r) s += phase(-q, a - b);
      return static_cast<double>(n) / N * s;
    }
    const cplx s = simd::kernels().structure_sum(view(*ensemble_), q);
    return static_cast<double>(n) / N * std::norm(s);
  }

  const std::uint64_t l = ell == 0 ? ell_prime : ell;
  const cplx sym = std::conj(simd::kernels().structure_sum(view(*ensemble_), q));
  const cplx v = sym * s_sum(n, l, q) /
                 (std::sqrt(static_cast<double>(dim)) * helmert_norm(l));
  return ell == 0 ? v : std::conj(v);
}

cplx Couplings::v_down(unsigned n, std::uint64_t ell, std::uint64_t ell_prime,
                       const WaveVector& k) const {
  if (n < 2) throw InvalidArgument("v_down needs n >= 2; use v_ground for n = 1");
  const std::uint64_t dim_hi = basis_size(n);
  const std::uint64_t dim_lo = basis_size(n - 1);
  if (ell != 0 && ell_prime != 0)
    throw InvalidArgument("v_down is available for (0,0), (0,ell) and (ell,0) only");
  if (ell >= dim_lo || ell_prime >= dim_hi) throw InvalidArgument("v_down label out of range");
  const double N = static_cast<double>(ensemble_->size());
  const Vec3 q = k0p_.components() - k.components();

  if (ell == 0 && ell_prime == 0) {
    const double nn = static_cast<double>(n);
    return std::sqrt(nn * (N - nn + 1.0)) / N *
           simd::kernels().structure_sum(view(*ensemble_), q);
  }
  if (ell == 0)
    return s_sum(n, ell_prime, q) /
           (std::sqrt(static_cast<double>(dim_lo)) * helmert_norm(ell_prime));
  return -s_sum(n - 1, ell, q) / (std::sqrt(static_cast<double>(dim_hi)) * helmert_norm(ell));
}

cplx Couplings::v_ground(std::uint64_t ell, const WaveVector& k) const {
  const std::uint64_t dim = basis_size(1);
  if (ell >= dim) throw InvalidArgument("v_ground label out of range");
  const Vec3 dk = k.components() - k0p_.components();
  if (ell == 0)
    return simd::kernels().structure_sum(view(*ensemble_), dk) /
           std::sqrt(static_cast<double>(dim));
  return s_sum(1, ell, dk) / helmert_norm(ell);
}

std::vector<cplx> Couplings::v11_row(const WaveVector& k) const {
  const std::size_t N = ensemble_->size();
  const Vec3 q = k0p_.components() - k.components();
  std::vector<double> re(N), im(N);
  simd::kernels().phase_factors(view(*ensemble_), q, re, im);
  const cplx total = simd::kernels().structure_sum(view(*ensemble_), q);
  const cplx sym = std::conj(total);
  std::vector<cplx> out(N);
  out[0] = std::norm(total) / static_cast<double>(N);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  cplx prefix{re[0], im[0]};
  for (std::size_t l = 1; l < N; ++l) {
    const cplx t{re[l], im[l]};
    out[l] = sym * (prefix - static_cast<double>(l) * t) * inv_sqrt_n / helmert_norm(l);
    prefix += t;
  }
  return out;
}

void Couplings::check_oracle_size(unsigned n) const {
  if (ensemble_->size() > kOracleMaxAtoms || n > kOracleMaxExcitations)
    throw InvalidArgument("oracle limited to N <= " + std::to_string(kOracleMaxAtoms) +
                          " and n <= " + std::to_string(kOracleMaxExcitations));
}

std::vector<cplx> Couplings::basis_vector(unsigned n, std::uint64_t ell) const {
  check_oracle_size(n);
  const std::uint64_t dim = basis_size(n);
  if (ell >= dim) throw InvalidArgument("basis label out of range");
  if (n == 0) return {cplx{1.0, 0.0}};
  const auto& r = ensemble_->positions();
  std::vector<cplx> v(dim);
  Tuple t(n);
  for (unsigned i = 0; i < n; ++i) t[i] = i;
  for (std::uint64_t g = 0; g < dim; ++g) {
    Vec3 sum{};
    for (auto a : t) sum += r[a];
    v[g] = phase(k0p_, sum);
    next_tuple(t, r.size());
  }
  if (ell == 0) {
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& x : v) x *= s;
    return v;
  }
  const double s = 1.0 / helmert_norm(ell);
  for (std::uint64_t g = 0; g < dim; ++g) {
    if (g < ell)
      v[g] *= s;
    else if (g == ell)
      v[g] *= -static_cast<double>(ell) * s;
    else
      v[g] = 0.0;
  }
  return v;
}

std::vector<cplx> Couplings::lower(const std::vector<cplx>& state, unsigned n,
                                   const Vec3& k) const {
  const auto& r = ensemble_->positions();
  std::vector<cplx> out(basis_size(n - 1));
  if (n == 1) {
    for (std::size_t a = 0; a < r.size(); ++a) out[0] += phase(-k, r[a]) * state[a];
    return out;
  }
  Tuple t(n);
  for (unsigned i = 0; i < n; ++i) t[i] = i;
  Tuple rest(n - 1);
  for (std::uint64_t g = 0; g < state.size(); ++g) {
    if (state[g] != cplx{}) {
      for (unsigned s = 0; s < n; ++s) {
        for (unsigned i = 0, o = 0; i < n; ++i)
          if (i != s) rest[o++] = t[i];
        out[rank_tuple(rest)] += phase(-k, r[t[s]]) * state[g];
      }
    }
    next_tuple(t, r.size());
  }
  return out;
}

cplx Couplings::oracle_element(unsigned n_bra, unsigned n_ket, std::uint64_t ell_bra,
                               std::uint64_t ell_ket, const WaveVector& k) const {
  if (n_ket == 0) throw InvalidArgument("oracle ket needs n >= 1");
  check_oracle_size(n_ket);
  const auto ket = lower(basis_vector(n_ket, ell_ket), n_ket, k);
  if (n_bra == n_ket) {
    const auto bra = lower(basis_vector(n_bra, ell_bra), n_bra, k);
    cplx s{};
    for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
    return s;
  }
  if (n_bra + 1 != n_ket) throw InvalidArgument("oracle needs n_bra == n_ket or n_ket - 1");
  const auto bra = basis_vector(n_bra, ell_bra);
  cplx s{};
  for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

Eigen::MatrixXcd Couplings::oracle_matrix(unsigned n, const WaveVector& k) const {
  if (n == 0) throw InvalidArgument("oracle needs n >= 1");
  check_oracle_size(n);
  const auto dim = static_cast<Eigen::Index>(basis_size(n));
  const auto rows = static_cast<Eigen::Index>(basis_size(n - 1));
  Eigen::MatrixXcd w(rows, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    const auto col = lower(basis_vector(n, static_cast<std::uint64_t>(l)), n, k);
    for (Eigen::Index i = 0; i < rows; ++i) w(i, l) = col[static_cast<std::size_t>(i)];
  }
  return w.adjoint() * w;
}

Eigen::MatrixXcd Couplings::gram(unsigned n) const {
  check_oracle_size(n);
  const auto dim = static_cast<Eigen::Index>(basis_size(n));
  Eigen::MatrixXcd b(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    const auto v = basis_vector(n, static_cast<std::uint64_t>(l));
    for (Eigen::Index i = 0; i < dim; ++i) b(i, l) = v[static_cast<std::size_t>(i)];
  }
  return b.adjoint() * b;
}

}  // namespace spinwave::dicke
