#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "spinwave/vec3.hpp"

namespace spinwave {

/// Converts between SI lengths and the dimensionless k_eg * r used internally.
/// Rates are always in units of the single-atom decay rate Gamma.
class PhysicalUnits {
 public:
  static constexpr double kDefaultWavelength = 780e-9;

  explicit PhysicalUnits(double wavelength_m = kDefaultWavelength,
                         std::optional<double> gamma_single_per_s = std::nullopt);

  double wavelength() const { return wavelength_; }
  double wavenumber() const { return wavenumber_; }  // k_eg in rad/m
  std::optional<double> gamma_single() const { return gamma_single_; }

  double to_dimensionless(double length_m) const { return length_m * wavenumber_; }
  double to_meters(double dimensionless) const { return dimensionless / wavenumber_; }

 private:
  double wavelength_;
  double wavenumber_;
  std::optional<double> gamma_single_;
};

struct Cube {
  double side;  // meters
};
struct Sphere {
  double radius;  // meters
};
struct Gaussian {
  double sigma;  // meters, per axis
};

/// Cloud shape. Sizes are in meters; the generator converts with PhysicalUnits.
class Geometry {
 public:
  using Variant = std::variant<Cube, Sphere, Gaussian>;

  Geometry(Variant shape);  // NOLINT(google-explicit-constructor)
  Geometry(Cube c) : Geometry(Variant{c}) {}          // NOLINT(google-explicit-constructor)
  Geometry(Sphere s) : Geometry(Variant{s}) {}        // NOLINT(google-explicit-constructor)
  Geometry(Gaussian g) : Geometry(Variant{g}) {}      // NOLINT(google-explicit-constructor)

  const Variant& shape() const { return shape_; }
  /// Volume in cm^3 used for density <-> count conversion. For the gaussian
  /// this is the effective volume (2 pi)^{3/2} sigma^3.
  double volume_cm3() const;
  /// `cube:side_um=10`, `sphere:radius_um=5`, `gaussian:sigma_um=2.5`
  std::string describe() const;
  static Geometry parse(const std::string& description);

 private:
  Variant shape_;
};

/// Either an explicit atom count or a number density in cm^-3.
struct AtomCount {
  std::uint64_t atoms;
};
struct NumberDensity {
  double per_cm3;
};
using CountOrDensity = std::variant<AtomCount, NumberDensity>;

/// Frozen atom positions (dimensionless k_eg * r) plus provenance.
/// Immutable once built.
class AtomicEnsemble {
 public:
  AtomicEnsemble(std::vector<Vec3> positions, Geometry geometry, std::uint64_t seed,
                 PhysicalUnits units);

  std::size_t size() const { return positions_.size(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& operator[](std::size_t i) const { return positions_[i]; }
  const Geometry& geometry() const { return geometry_; }
  std::uint64_t seed() const { return seed_; }
  const PhysicalUnits& units() const { return units_; }
  double density_per_cm3() const { return density_; }

  /// Structure-of-arrays copy for the vector kernels.
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<double>& zs() const { return zs_; }

  /// FNV-1a over the canonical text serialization.
  std::uint64_t content_hash() const;

 private:
  std::vector<Vec3> positions_;
  std::vector<double> xs_, ys_, zs_;
  Geometry geometry_;
  std::uint64_t seed_;
  PhysicalUnits units_;
  double density_;
};

/// N = round(rho * V) for a density request; throws "empty ensemble" if zero.
std::uint64_t resolve_atom_count(const Geometry& geometry, const CountOrDensity& request);

/// Samples i.i.d. positions. Atom i draws from its own stream keyed by
/// (seed, i), so the result does not depend on evaluation order.
AtomicEnsemble generate_ensemble(const Geometry& geometry, const CountOrDensity& request,
                                 std::uint64_t seed, const PhysicalUnits& units = PhysicalUnits{});

/// Text format:
///   # ensemble v1 N=<int> seed=<int> geometry=<desc> wavelength_nm=<float>
///   x y z          (N rows, 17 significant digits)
void save_ensemble(const AtomicEnsemble& ensemble, const std::filesystem::path& path);
std::string format_ensemble(const AtomicEnsemble& ensemble);
AtomicEnsemble load_ensemble(const std::filesystem::path& path);
AtomicEnsemble parse_ensemble(const std::string& text);

struct PairSeparation {
  std::size_t mu;
  std::size_t nu;
  Vec3 separation;  // r_mu - r_nu
  double distance;
  bool coincident;  // distance == 0
};

/// All N(N-1)/2 unordered pairs with mu < nu.
std::vector<PairSeparation> pair_separations(const AtomicEnsemble& ensemble);

/// Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// 64-bit mixer used to derive per-item seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace spinwave
