#pragma once

// Retrieval dynamics: the pi pulse, decay of the symmetric amplitude, the
// single-photon mode amplitudes and spectrum, and the two-photon cascade of a
// doubly excited spin wave. Time in units of 1/Γ, detunings and rates in Γ.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinwave/ensemble.hpp"
#include "spinwave/radiative.hpp"
#include "spinwave/vec3.hpp"

namespace spinwave::dynamics {

enum class PulseShape { square, sin2 };

std::string to_string(PulseShape shape);
PulseShape parse_pulse_shape(const std::string& name);

/// Resonant pi pulse. The duration is fixed by the area condition
/// β(T) = Ω̄ T / 2 = π/2, so T = π / Ω̄ for both shapes.
class PulseProfile {
 public:
  PulseProfile(PulseShape shape, double mean_rabi);

  PulseShape shape() const { return shape_; }
  double mean_rabi() const { return mean_rabi_; }
  double duration() const { return duration_; }
  /// Ω_L(t); zero outside [0, T].
  double rabi(double t) const;
  /// β(t) = ∫_0^t Ω_L / 2, saturating at π/2.
  double beta(double t) const;

 private:
  PulseShape shape_;
  double mean_rabi_;
  double duration_;
};

struct AmplitudeTrace {
  std::vector<double> t;
  std::vector<cplx> value;
};

/// 𝓔_0(t) = sin β(t) e^{-Γ_N t / 2}.
AmplitudeTrace e0_of_t(const PulseProfile& pulse, cplx gamma_n, const std::vector<double>& t);

struct Validity {
  bool ok;
  double ratio;  // Re Γ_N T / 2
};
inline constexpr double kValidityThreshold = 0.1;
Validity validity_check(const PulseProfile& pulse, cplx gamma_n);

/// G(t) = [(e^{-(Γ_N/2 + iΔ) t} - 1) / (Γ_N/2 + iΔ)] v0g. t may be +infinity.
cplx mode_amplitude(cplx gamma_n, cplx v0g, double detuning, double t);

struct Direction {
  Vec3 k;         // unit vector
  double weight;  // solid angle
};

/// Directions on the emission shell times a detuning grid. Mode (d, j) has
/// flat index d * detunings().size() + j.
class ModeGrid {
 public:
  ModeGrid(std::vector<Direction> directions, std::vector<double> detunings,
           std::vector<double> detuning_weights, radiative::DipoleAxis axis);

  /// Gauss-Legendre in cos θ times uniform φ about `polar_axis`.
  static std::vector<Direction> sphere(unsigned n_theta, unsigned n_phi, Vec3 polar_axis);
  /// `points` equally spaced detunings on [-half_width, half_width].
  static std::vector<double> detuning_grid(double half_width, std::size_t points);
  /// Trapezoid weights for an ordered grid.
  static std::vector<double> trapezoid_weights(const std::vector<double>& x);
  /// The default detuning grid: 512 points over ±20 Re Γ_N.
  static ModeGrid with_default_detunings(std::vector<Direction> directions, cplx gamma_n,
                                         radiative::DipoleAxis axis);

  const std::vector<Direction>& directions() const { return directions_; }
  const std::vector<double>& detunings() const { return detunings_; }
  const std::vector<double>& detuning_weights() const { return detuning_weights_; }
  const radiative::DipoleAxis& axis() const { return axis_; }
  std::size_t size() const { return directions_.size() * detunings_.size(); }

  /// (3/8π)(1 - (n·k)^2) dΩ; the polarization sum of the mode density.
  double direction_measure(std::size_t d) const;
  /// Full measure of mode (d, j), including dΔ/2π.
  double measure(std::size_t d, std::size_t j) const;

 private:
  std::vector<Direction> directions_;
  std::vector<double> detunings_;
  std::vector<double> detuning_weights_;
  radiative::DipoleAxis axis_;
};

/// V_{0G}(k) for every direction of the grid.
std::vector<cplx> ground_couplings(const AtomicEnsemble& e, const WaveVector& k0p,
                                   const ModeGrid& grid, unsigned threads = 0);

struct SpectrumSample {
  double detuning;
  Vec3 direction;
  double intensity;  // |G(t)|^2, or scaled to a unit peak
};

std::vector<SpectrumSample> emission_spectrum(const AtomicEnsemble& e, const WaveVector& k0p,
                                              cplx gamma_n, const ModeGrid& grid, double t,
                                              bool normalize_peak = false, unsigned threads = 0);

/// w ∝ V_{0G}(k) / (Γ_N/2 + iΔ), normalised to Σ |w|^2 measure = 1.
std::vector<cplx> phase_matched_weights(const AtomicEnsemble& e, const WaveVector& k0p,
                                        cplx gamma_n, const ModeGrid& grid,
                                        unsigned threads = 0);

struct Bookkeeping {
  double symmetric;  // |𝓔_0(t)|^2
  double emitted;    // Σ |G(t)|^2 measure
  double total() const { return symmetric + emitted; }
};

/// Photon-number balance after instantaneous preparation of the symmetric state.
Bookkeeping photon_bookkeeping(const AtomicEnsemble& e, const WaveVector& k0p, cplx gamma_n,
                               const ModeGrid& grid, double t, unsigned threads = 0);

struct CascadeResult {
  AmplitudeTrace e02;                  // 𝓔_{0[2]}(t)
  std::vector<AmplitudeTrace> ephi0;   // 𝓔^φ_0(t), one per mode
  Eigen::MatrixXcd g_asymptotic;       // G^{φφ'}(∞)
  std::vector<cplx> v12;               // first-photon couplings per direction
  std::vector<cplx> vg0;               // second-photon couplings per direction
};

/// Limit on grid size for the two-photon table.
inline constexpr std::size_t kCascadeMaxModes = 4096;

/// Two-photon cascade from the doubly excited symmetric state, prepared
/// instantaneously. The first photon leaves through V^{[1,2]}_{00}(k), the
/// second through V_{G0}(k) = conj V_{0G}(k).
CascadeResult cascade_two_photon(const AtomicEnsemble& e, const WaveVector& k0p, cplx gamma_n,
                                 const ModeGrid& grid, const std::vector<double>& t,
                                 unsigned threads = 0);

struct OdeResult {
  std::vector<double> t;
  std::vector<cplx> symmetric;     // <sym|E(t)>
  std::vector<double> norm2;       // ||E(t)||^2
  std::vector<double> leakage;     // 1 - |<sym|E>|^2 / ||E||^2 (0 where E = 0)
  std::vector<Eigen::VectorXcd> states;  // E(t), kept on request
  cplx initial_slope;              // d/dt <sym|E> at t = 0, from the right-hand side
};

inline constexpr std::size_t kOdeMaxAtoms = 2000;

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  radiative::KernelMode mode = radiative::KernelMode::real_only;
  bool keep_states = false;
  unsigned threads = 0;
};

/// Integrates the per-atom single-excitation amplitudes with the full decay
/// matrix. Without a pulse E starts in the timed-Dicke state; with one, the
/// excitation starts in the metastable spin wave R and is transferred by the
/// laser: dE/dt = (Ω/2) R - M E, dR/dt = -(Ω/2) E.
OdeResult single_exc_ode_oracle(const AtomicEnsemble& e, const WaveVector& k0p,
                                const radiative::DipoleAxis& axis,
                                const std::optional<PulseProfile>& pulse,
                                const std::vector<double>& t, const OdeOptions& options = {});

struct LorentzianFit {
  double amplitude;
  double center;
  double fwhm;
  double rms_residual;
};

/// Least-squares fit of a / (1 + ((x - c) / (w/2))^2).
LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spinwave::dynamics
