#include "spinwave/ensemble.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "spinwave/error.hpp"
#include "spinwave/format.hpp"

namespace spinwave {

namespace {

constexpr double kMetersPerMicron = 1e-6;
constexpr double kCmPerMeter = 100.0;

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

WaveVector::WaveVector(Vec3 components) : k_(components), magnitude_(norm(components)) {
  if (!is_finite(k_)) throw InvalidArgument("wave vector has non-finite components");
}

PhysicalUnits::PhysicalUnits(double wavelength_m, std::optional<double> gamma_single_per_s)
    : wavelength_(wavelength_m),
      wavenumber_(2.0 * std::numbers::pi / wavelength_m),
      gamma_single_(gamma_single_per_s) {
  if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
    throw InvalidArgument("wavelength must be positive");
  if (gamma_single_ && !(*gamma_single_ > 0.0))
    throw InvalidArgument("single-atom decay rate must be positive");
}

Geometry::Geometry(Variant shape) : shape_(shape) {
  const double size = std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Cube>) return s.side;
        if constexpr (std::is_same_v<T, Sphere>) return s.radius;
        if constexpr (std::is_same_v<T, Gaussian>) return s.sigma;
      },
      shape_);
  if (!(size > 0.0) || !std::isfinite(size))
    throw InvalidArgument("geometry size parameter must be positive");
}

double Geometry::volume_cm3() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Cube>) {
          const double l = s.side * kCmPerMeter;
          return l * l * l;
        } else if constexpr (std::is_same_v<T, Sphere>) {
          const double r = s.radius * kCmPerMeter;
          return 4.0 / 3.0 * std::numbers::pi * r * r * r;
        } else {
          const double sg = s.sigma * kCmPerMeter;
          return std::pow(2.0 * std::numbers::pi, 1.5) * sg * sg * sg;
        }
      },
      shape_);
}

std::string Geometry::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Cube>)
          return "cube:side_um=" + format_double(s.side / kMetersPerMicron);
        else if constexpr (std::is_same_v<T, Sphere>)
          return "sphere:radius_um=" + format_double(s.radius / kMetersPerMicron);
        else
          return "gaussian:sigma_um=" + format_double(s.sigma / kMetersPerMicron);
      },
      shape_);
}

Geometry Geometry::parse(const std::string& description) {
  const auto colon = description.find(':');
  const auto eq = description.find('=');
  if (colon == std::string::npos || eq == std::string::npos || eq < colon)
    throw InvalidArgument("bad geometry description '" + description + "'");
  const std::string kind = description.substr(0, colon);
  const std::string key = description.substr(colon + 1, eq - colon - 1);
  double value = 0.0;
  if (!parse_number(std::string_view(description).substr(eq + 1), value))
    throw InvalidArgument("bad geometry size in '" + description + "'");
  const double meters = value * kMetersPerMicron;
  if (kind == "cube" && key == "side_um") return Geometry(Cube{meters});
  if (kind == "sphere" && key == "radius_um") return Geometry(Sphere{meters});
  if (kind == "gaussian" && key == "sigma_um") return Geometry(Gaussian{meters});
  throw InvalidArgument("unknown geometry '" + description + "'");
}

AtomicEnsemble::AtomicEnsemble(std::vector<Vec3> positions, Geometry geometry, std::uint64_t seed,
                               PhysicalUnits units)
    : positions_(std::move(positions)),
      geometry_(std::move(geometry)),
      seed_(seed),
      units_(units) {
  if (positions_.empty()) throw InvalidArgument("empty ensemble");
  xs_.reserve(positions_.size());
  ys_.reserve(positions_.size());
  zs_.reserve(positions_.size());
  for (const auto& p : positions_) {
    if (!is_finite(p)) throw InvalidArgument("non-finite atom position");
    xs_.push_back(p.x);
    ys_.push_back(p.y);
    zs_.push_back(p.z);
  }
  density_ = static_cast<double>(positions_.size()) / geometry_.volume_cm3();
}

std::uint64_t AtomicEnsemble::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_ensemble(*this)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t resolve_atom_count(const Geometry& geometry, const CountOrDensity& request) {
  std::uint64_t n = 0;
  if (const auto* c = std::get_if<AtomCount>(&request)) {
    n = c->atoms;
  } else {
    const double rho = std::get<NumberDensity>(request).per_cm3;
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("density must be positive");
    n = static_cast<std::uint64_t>(std::llround(rho * geometry.volume_cm3()));
  }
  if (n == 0) throw InvalidArgument("empty ensemble");
  return n;
}

AtomicEnsemble generate_ensemble(const Geometry& geometry, const CountOrDensity& request,
                                 std::uint64_t seed, const PhysicalUnits& units) {
  const std::uint64_t n = resolve_atom_count(geometry, request);
  std::vector<Vec3> positions(n);

  for (std::uint64_t i = 0; i < n; ++i) {
    std::mt19937_64 engine(derive_seed(seed, i));
    positions[i] = std::visit(
        [&](const auto& s) -> Vec3 {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Cube>) {
            const double side = units.to_dimensionless(s.side);
            const double x = (uniform01(engine) - 0.5) * side;
            const double y = (uniform01(engine) - 0.5) * side;
            const double z = (uniform01(engine) - 0.5) * side;
            return {x, y, z};
          } else if constexpr (std::is_same_v<T, Sphere>) {
            const double r = units.to_dimensionless(s.radius);
            for (;;) {
              const Vec3 p{(2.0 * uniform01(engine) - 1.0) * r, (2.0 * uniform01(engine) - 1.0) * r,
                           (2.0 * uniform01(engine) - 1.0) * r};
              if (dot(p, p) <= r * r) return p;
            }
          } else {
            // Box-Muller on our own uniform stream keeps the output identical
            // across standard library implementations.
            const double sg = units.to_dimensionless(s.sigma);
            double g[4];
            for (int k = 0; k < 2; ++k) {
              const double u1 = 1.0 - uniform01(engine);
              const double u2 = uniform01(engine);
              const double rad = std::sqrt(-2.0 * std::log(u1));
              g[2 * k] = rad * std::cos(2.0 * std::numbers::pi * u2);
              g[2 * k + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
            }
            return {g[0] * sg, g[1] * sg, g[2] * sg};
          }
        },
        geometry.shape());
  }
  return AtomicEnsemble(std::move(positions), geometry, seed, units);
}

std::string format_ensemble(const AtomicEnsemble& ensemble) {
  std::string out;
  out.reserve(64 + ensemble.size() * 72);
  out += "# ensemble v1 N=" + std::to_string(ensemble.size()) +
         " seed=" + std::to_string(ensemble.seed()) +
         " geometry=" + ensemble.geometry().describe() +
         " wavelength_nm=" + format_double(ensemble.units().wavelength() * 1e9) + "\n";
  for (const auto& p : ensemble.positions()) {
    out += format_fixed_digits(p.x);
    out += ' ';
    out += format_fixed_digits(p.y);
    out += ' ';
    out += format_fixed_digits(p.z);
    out += '\n';
  }
  return out;
}

void save_ensemble(const AtomicEnsemble& ensemble, const std::filesystem::path& path) {
  write_file_atomically(path, format_ensemble(ensemble));
}

AtomicEnsemble parse_ensemble(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  const auto tokens = split_ws(line);
  if (tokens.size() != 7 || tokens[0] != "#" || tokens[1] != "ensemble" || tokens[2] != "v1")
    throw ParseError(lineno, "expected '# ensemble v1 N=... seed=... geometry=... wavelength_nm=...'");

  auto field = [&](std::string_view token, std::string_view key) -> std::string_view {
    if (token.substr(0, key.size()) != key || token.size() <= key.size() || token[key.size()] != '=')
      throw ParseError(lineno, "expected field '" + std::string(key) + "='");
    return token.substr(key.size() + 1);
  };

  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double wavelength_nm = 0.0;
  if (!parse_number(field(tokens[3], "N"), n) || n == 0) throw ParseError(lineno, "bad atom count");
  if (!parse_number(field(tokens[4], "seed"), seed)) throw ParseError(lineno, "bad seed");
  const std::string geometry_desc(field(tokens[5], "geometry"));
  if (!parse_number(field(tokens[6], "wavelength_nm"), wavelength_nm) || !(wavelength_nm > 0.0))
    throw ParseError(lineno, "bad wavelength");

  std::optional<Geometry> geometry;
  try {
    geometry = Geometry::parse(geometry_desc);
  } catch (const InvalidArgument& e) {
    throw ParseError(lineno, e.what());
  }

  std::vector<Vec3> positions;
  positions.reserve(n);
  while (std::getline(in, line)) {
    ++lineno;
    const auto cols = split_ws(line);
    if (cols.empty()) continue;
    if (cols.size() != 3) throw ParseError(lineno, "expected 3 columns 'x y z'");
    Vec3 p;
    if (!parse_number(cols[0], p.x) || !parse_number(cols[1], p.y) || !parse_number(cols[2], p.z))
      throw ParseError(lineno, "bad coordinate");
    if (positions.size() == n) throw ParseError(lineno, "more rows than declared N");
    positions.push_back(p);
  }
  if (positions.size() != n)
    throw ParseError(lineno, "declared N=" + std::to_string(n) + " but found " +
                                 std::to_string(positions.size()) + " rows");
  return AtomicEnsemble(std::move(positions), *geometry, seed, PhysicalUnits(wavelength_nm * 1e-9));
}

AtomicEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open ensemble file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ensemble(buffer.str());
}

std::vector<PairSeparation> pair_separations(const AtomicEnsemble& ensemble) {
  const auto& r = ensemble.positions();
  std::vector<PairSeparation> pairs;
  pairs.reserve(r.size() * (r.size() - 1) / 2);
  for (std::size_t mu = 0; mu < r.size(); ++mu) {
    for (std::size_t nu = mu + 1; nu < r.size(); ++nu) {
      const Vec3 d = r[mu] - r[nu];
      const double dist = norm(d);
      pairs.push_back({mu, nu, d, dist, dist == 0.0});
    }
  }
  return pairs;
}

}  // namespace spinwave
