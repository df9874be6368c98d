#pragma once

// Timed-Dicke basis and the radiative couplings between its members.
//
// Conventions:
//  * atoms are labelled 0..N-1; n-atom tuples are strictly increasing and
//    ranked colexicographically from 0, so tuple rank r corresponds to the
//    1-based label r+1 used in the usual notation;
//  * basis label ell = 0 is the symmetric state, ell >= 1 is the Helmert-type
//    state built from tuple ranks 0..ell-1 against rank ell, normalised by
//    L = ell (ell + 1);
//  * wave vectors are in units of k_eg; k0p is the phase-matched direction
//    k'_0 = k_0 - k_L.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinwave/ensemble.hpp"
#include "spinwave/vec3.hpp"

namespace spinwave::dicke {

using Tuple = std::vector<std::uint32_t>;

/// Exact binomial coefficient; throws InvalidArgument on 64-bit overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

std::uint64_t rank_tuple(std::span<const std::uint32_t> tuple);
Tuple unrank_tuple(std::uint64_t rank, unsigned n, std::size_t atoms);
/// Advances to the colex successor; returns false after the last tuple.
bool next_tuple(Tuple& tuple, std::size_t atoms);

struct DickeIndex {
  unsigned n;         // excitation number
  std::uint64_t ell;  // 0 = symmetric
};

enum class SumMode {
  factorized,  // O(N) structure-factor form
  double_sum,  // literal O(N^2) sum, kept as a self-check
};

/// Oracle limits: explicit product-basis vectors of dimension binom(N, n).
inline constexpr std::size_t kOracleMaxAtoms = 14;
inline constexpr unsigned kOracleMaxExcitations = 3;

class Couplings {
 public:
  Couplings(const AtomicEnsemble& ensemble, WaveVector k0p);

  const AtomicEnsemble& ensemble() const { return *ensemble_; }
  const WaveVector& k0p() const { return k0p_; }

  /// S^ell_{j[n]}(dk) = sum_s [e^{i dk.r_{j(s)}} - e^{i dk.r_{ell(s)}}], j < ell.
  cplx s_function(unsigned n, std::uint64_t ell, std::uint64_t j, DeltaK dk) const;
  /// sum_{j < ell} S^ell_{j[n]}(dk)
  cplx s_sum(unsigned n, std::uint64_t ell, DeltaK dk) const;

  /// Same-n coupling V^{[n,n]}_{ell ell'}(k) for (0,0), (0,ell), (ell,0).
  /// (0,0) and all n = 1 elements are exact; n >= 2 non-symmetric ones are
  /// leading order in 1/N.
  cplx v_nn(unsigned n, std::uint64_t ell, std::uint64_t ell_prime, const WaveVector& k,
            SumMode mode = SumMode::factorized) const;

  /// n -> n-1 coupling V^{[n-1,n]}_{ell ell'}(k), n >= 2 (use v_ground for n = 1).
  /// Bra carries n-1 excitations, ket n.
  cplx v_down(unsigned n, std::uint64_t ell, std::uint64_t ell_prime, const WaveVector& k) const;

  /// V_{ell G}(k) = sum_mu e^{i k.r_mu} <E_ell| sigma^+_mu |G>.
  cplx v_ground(std::uint64_t ell, const WaveVector& k) const;

  /// Every n = 1 non-symmetric coupling at once in O(N):
  /// out[ell] = V^{[1,1]}_{0 ell}(k), out[0] = V^{[1,1]}_{00}(k).
  std::vector<cplx> v11_row(const WaveVector& k) const;

  // --- brute-force product-basis oracle ---

  /// Explicit state vector indexed by colex tuple rank.
  std::vector<cplx> basis_vector(unsigned n, std::uint64_t ell) const;
  /// <bra| B^dagger B |ket> (same n) or <bra| B |ket> (n_bra = n_ket - 1) with
  /// B = sum_nu e^{-i k.r_nu} sigma_nu, no approximation.
  cplx oracle_element(unsigned n_bra, unsigned n_ket, std::uint64_t ell_bra,
                      std::uint64_t ell_ket, const WaveVector& k) const;
  /// Full same-n oracle matrix over the whole basis.
  Eigen::MatrixXcd oracle_matrix(unsigned n, const WaveVector& k) const;
  /// Gram matrix of the explicit basis vectors.
  Eigen::MatrixXcd gram(unsigned n) const;

 private:
  std::uint64_t basis_size(unsigned n) const;
  void check_oracle_size(unsigned n) const;
  std::vector<cplx> lower(const std::vector<cplx>& state, unsigned n, const Vec3& k) const;

  const AtomicEnsemble* ensemble_;
  WaveVector k0p_;
};

}  // namespace spinwave::dicke
