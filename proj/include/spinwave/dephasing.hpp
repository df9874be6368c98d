#pragma once

// Interaction-induced phases on doubly excited spin waves and their effect on
// the spin-wave g2 and on overlaps with the timed-Dicke basis.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spinwave/ensemble.hpp"
#include "spinwave/vec3.hpp"

namespace spinwave::dephasing {

/// Φ = c6 T / r^6 with r in units of 1/k_eg; ħ absorbed into c6.
struct VanDerWaals {
  double c6;
};
/// Φ = c3 T / r^3.
struct Dipolar {
  double c3;
};
/// Φ_μν i.i.d. uniform on [0, width) for any T > 0.
struct IidUniform {
  double width;
};
struct NoInteraction {};

using InteractionModel = std::variant<VanDerWaals, Dipolar, IidUniform, NoInteraction>;

void validate(const InteractionModel& model);
std::string describe(const InteractionModel& model);

/// Real symmetric N x N phases with zero diagonal.
class PhaseMatrix {
 public:
  explicit PhaseMatrix(Eigen::MatrixXd phases);
  std::size_t size() const { return static_cast<std::size_t>(phi_.rows()); }
  double operator()(std::size_t mu, std::size_t nu) const {
    return phi_(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(nu));
  }
  const Eigen::MatrixXd& matrix() const { return phi_; }

 private:
  Eigen::MatrixXd phi_;
};

PhaseMatrix phase_matrix(const AtomicEnsemble& e, const InteractionModel& model, double T,
                         std::uint64_t seed);

struct StateAmplitudes {
  cplx c0, c1, c2;
  StateAmplitudes(cplx c0, cplx c1, cplx c2);
  /// c_n = 1/sqrt(e n!), n = 0, 1, 2
  static StateAmplitudes truncated_coherent();
};

/// 2|c2|^2 / (|c1|^2 + 2|c2|^2)^2
double g2_zero(const StateAmplitudes& c);

/// Correlation after the phase shifts, unrestricted sums with Φ_μμ = 0:
///   |c2|^2 |√2/N^2 Σ_μν e^{iΦ}|^2 / [|c1|^2 + |c2|^2 (2/N^3) Σ_μ |Σ_ν e^{iΦ}|^2]^2
double g2_of_T(const StateAmplitudes& c, const PhaseMatrix& phi);

/// Long-time form once the phase sums in the denominator have died out:
///   (2|c2|^2 / |c1|^4) |N^-2 Σ_μν e^{iΦ}|^2.
/// For truncated coherent amplitudes the prefactor equals 4 g2_zero.
double g2_asymptotic(const StateAmplitudes& c, const PhaseMatrix& phi);

struct Overlap {
  cplx value;
  cplx standard_error;  // per component; zero when exact
  bool exact;
  std::uint64_t samples;
};

struct OverlapOptions {
  bool force_monte_carlo = false;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

/// <E_0[n]| applied to the dephased symmetric state:
///   binom(N,n)^-1 Σ_{tuples} e^{i Σ_{l<j} Φ_{μ_l μ_j}}.
/// Exact enumeration for n <= 3, tuple sampling beyond.
Overlap overlap_symmetric(const PhaseMatrix& phi, unsigned n, const OverlapOptions& options = {});

/// <E_ell[2]|Φ>, 1 <= ell < binom(N, 2).
cplx overlap_nonsymmetric_2(const PhaseMatrix& phi, std::uint64_t ell);
/// All n = 2 overlaps at once; index 0 is the symmetric one.
std::vector<cplx> overlaps_2(const PhaseMatrix& phi);

}  // namespace spinwave::dephasing
