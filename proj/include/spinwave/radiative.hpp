#pragma once

// Pair radiation kernel, generalized collective decay rate and the
// single-excitation decay matrix. Rates are in units of the single-atom Γ.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinwave/ensemble.hpp"
#include "spinwave/vec3.hpp"

namespace spinwave::radiative {

/// Common orientation of all atomic dipoles. Stored normalised.
class DipoleAxis {
 public:
  DipoleAxis() = default;  // x axis
  explicit DipoleAxis(Vec3 direction);
  const Vec3& direction() const { return n_; }

 private:
  Vec3 n_{1.0, 0.0, 0.0};
};

enum class KernelMode {
  real_only,  // K = f, the literal angular integral
  complex,    // K = f + i g, adds the dispersive (level shift) partner
};

std::string to_string(KernelMode mode);
KernelMode parse_kernel_mode(const std::string& name);

/// (3/8π) ∫ dΩ_k (1 - (n·k)^2) e^{i k.x} on the unit shell, closed form.
double f_pair(const Vec3& x, const DipoleAxis& axis);
/// Dispersive partner of f. Diverges as x -> 0; finite only for x > 0.
double g_pair(const Vec3& x, const DipoleAxis& axis);

/// The same integral by adaptive 2D quadrature. Throws NumericError if the
/// requested tolerance is not reached.
double f_quadrature(const Vec3& x, const DipoleAxis& axis, double tol);

struct ComplexRate {
  cplx value;                        // Γ_N / Γ
  KernelMode mode = KernelMode::real_only;
  std::size_t near_zone_pairs = 0;   // pairs whose dispersive part was dropped
  std::size_t coincident_pairs = 0;
  std::vector<std::string> warnings;
};

/// Γ_N = 1 + (1/N) Σ_{μ≠ν} e^{-i k'0.(r_μ - r_ν)} K(r_μ - r_ν).
ComplexRate gamma_n(const AtomicEnsemble& e, const WaveVector& k0p, const DipoleAxis& axis,
                    KernelMode mode = KernelMode::real_only, unsigned threads = 0);

/// M_μν = K_μν / 2, M_μμ = 1/2. dE/dt = -M E without the driving laser.
Eigen::MatrixXcd decay_matrix(const AtomicEnsemble& e, const DipoleAxis& axis,
                              KernelMode mode = KernelMode::real_only, unsigned threads = 0);

}  // namespace spinwave::radiative
