#pragma once

// Typed views of the JSON config sections. Each parser validates its section
// and throws InvalidArgument naming the offending key.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinwave/dephasing.hpp"
#include "spinwave/dynamics.hpp"
#include "spinwave/ensemble.hpp"
#include "spinwave/radiative.hpp"

namespace spinwave::cli::config {

using nlohmann::json;

struct EnsembleSpec {
  std::optional<std::filesystem::path> file;
  std::optional<Geometry> geometry;
  std::optional<CountOrDensity> count;
  PhysicalUnits units;
  std::uint64_t seed = 0;
};

struct Common {
  EnsembleSpec ensemble;
  WaveVector k0p;
  radiative::DipoleAxis axis;
  radiative::KernelMode mode = radiative::KernelMode::real_only;
};

enum class ScanType { cut, patch };

struct ScanSpec {
  ScanType type = ScanType::cut;
  double a_min = 0.0, a_max = 0.0;  // along e1, units of k_eg
  double b_min = 0.0, b_max = 0.0;  // along e2 (patch only)
  std::size_t points_a = 0, points_b = 1;
};

enum class CouplingKind { v_nn, v_down, v_ground, s_sum, nonsym_aggregate };
enum class Normalization { none, max, sym_peak };

struct CouplingEntry {
  std::string name;
  CouplingKind kind = CouplingKind::v_nn;
  unsigned n = 1;
  std::uint64_t ell = 0;
  std::uint64_t ell_prime = 0;
  Normalization normalize = Normalization::none;
};

struct CouplingMapSpec {
  ScanSpec scan;
  std::vector<CouplingEntry> couplings;
};

enum class DirectionSet { phase_matched, sphere, list };

struct GridSpec {
  DirectionSet directions = DirectionSet::phase_matched;
  unsigned n_theta = 0, n_phi = 0;
  std::vector<Vec3> list;
  std::size_t detuning_points = 512;
  double half_width_over_re_gamma = 20.0;
};

struct SpectrumSpec {
  double t = std::numeric_limits<double>::infinity();
  bool normalize_peak = false;
};

struct DynamicsSpec {
  bool ode_oracle = false;
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct G2Spec {
  std::vector<double> storage_times{0.0};
  std::uint64_t overlap_samples = 100000;
};

Common parse_common(const json& config);
CouplingMapSpec parse_coupling_map(const json& config);
std::optional<dynamics::PulseProfile> parse_pulse(const json& config);
std::vector<double> parse_times(const json& config);
GridSpec parse_grid(const json& config);
SpectrumSpec parse_spectrum(const json& config);
DynamicsSpec parse_dynamics(const json& config);
dephasing::InteractionModel parse_interaction(const json& config);
dephasing::StateAmplitudes parse_amplitudes(const json& config);
G2Spec parse_g2(const json& config);

std::string to_string(CouplingKind kind);

}  // namespace spinwave::cli::config
