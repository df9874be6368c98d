#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <set>
#include <string_view>

#include "spinwave/error.hpp"

namespace spinwave::cli::config {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InvalidArgument("config: " + where + ": " + what);
}

std::string join(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

const json& object_at(const json& parent, const char* key, const std::string& where) {
  const json& j = parent.at(key);
  if (!j.is_object()) fail(join(where, key), "expected an object");
  return j;
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(join(where, key), "unknown key");
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(join(where, key), "missing");
  const json& j = obj.at(key);
  if (!j.is_number()) fail(join(where, key), "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(join(where, key), "must be finite");
  return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

double positive(const json& obj, const char* key, const std::string& where) {
  const double v = number(obj, key, where);
  if (!(v > 0.0)) fail(join(where, key), "must be positive");
  return v;
}

std::uint64_t unsigned_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(join(where, key), "missing");
  const json& j = obj.at(key);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(join(where, key), "expected a non-negative integer");
}

std::uint64_t unsigned_or(const json& obj, const char* key, std::uint64_t fallback,
                          const std::string& where) {
  return obj.contains(key) ? unsigned_int(obj, key, where) : fallback;
}

bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(join(where, key), "expected true or false");
  return obj.at(key).get<bool>();
}

std::string string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(join(where, key), "missing");
  if (!obj.at(key).is_string()) fail(join(where, key), "expected a string");
  return obj.at(key).get<std::string>();
}

std::string string_or(const json& obj, const char* key, const std::string& fallback,
                      const std::string& where) {
  return obj.contains(key) ? string(obj, key, where) : fallback;
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected [x, y, z]");
  Vec3 v;
  double* out[] = {&v.x, &v.y, &v.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) fail(where, "expected numbers");
    *out[i] = j[i].get<double>();
  }
  if (!is_finite(v)) fail(where, "must be finite");
  return v;
}

Vec3 unit_vec3(const json& j, const std::string& where) {
  const Vec3 v = vec3(j, where);
  const double len = norm(v);
  if (!(len > 0.0)) fail(where, "must be nonzero");
  return v / len;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(where, "expected numbers");
    out.push_back(v.get<double>());
    if (!std::isfinite(out.back())) fail(where, "must be finite");
  }
  return out;
}

cplx complex_value(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where, "expected a number or [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

constexpr double kMicron = 1e-6;

Geometry parse_geometry(const json& g) {
  const std::string where = "geometry";
  const std::string shape = string(g, "shape", where);
  if (shape == "cube") {
    check_keys(g, {"shape", "side_um"}, where);
    return Cube{positive(g, "side_um", where) * kMicron};
  }
  if (shape == "sphere") {
    check_keys(g, {"shape", "radius_um"}, where);
    return Sphere{positive(g, "radius_um", where) * kMicron};
  }
  if (shape == "gaussian") {
    check_keys(g, {"shape", "sigma_um"}, where);
    return Gaussian{positive(g, "sigma_um", where) * kMicron};
  }
  fail(join(where, "shape"), "expected cube, sphere or gaussian, got '" + shape + "'");
}

const std::set<std::string_view> kTopLevel = {
    "seed",      "wavelength_nm", "geometry", "atoms",  "density_per_cm3", "ensemble_file",
    "k0p",       "dipole_axis",   "kernel_mode", "coupling_map", "pulse", "times",
    "dynamics",  "mode_grid",     "spectrum", "interaction", "amplitudes", "g2"};

}  // namespace

Common parse_common(const json& config) {
  if (!config.is_object()) fail("", "top level must be an object");
  for (const auto& [key, value] : config.items())
    if (!kTopLevel.contains(key)) fail(key, "unknown key");

  Common c;
  if (!config.contains("seed")) fail("seed", "missing (every run needs an explicit seed)");
  c.ensemble.seed = unsigned_int(config, "seed", "");

  const bool from_file = config.contains("ensemble_file");
  if (from_file) {
    for (const char* k : {"geometry", "atoms", "density_per_cm3", "wavelength_nm"})
      if (config.contains(k)) fail(k, "not allowed together with ensemble_file");
    c.ensemble.file = string(config, "ensemble_file", "");
  } else {
    if (!config.contains("geometry")) fail("geometry", "missing (or give ensemble_file)");
    c.ensemble.geometry = parse_geometry(object_at(config, "geometry", ""));
    const bool atoms = config.contains("atoms");
    const bool density = config.contains("density_per_cm3");
    if (atoms == density) fail("atoms", "give exactly one of atoms and density_per_cm3");
    if (atoms) {
      const auto n = unsigned_int(config, "atoms", "");
      if (n == 0) fail("atoms", "must be positive");
      c.ensemble.count = AtomCount{n};
    } else {
      c.ensemble.count = NumberDensity{positive(config, "density_per_cm3", "")};
    }
    const double wavelength_nm = config.contains("wavelength_nm")
                                     ? positive(config, "wavelength_nm", "")
                                     : PhysicalUnits::kDefaultWavelength * 1e9;
    c.ensemble.units = PhysicalUnits(wavelength_nm * 1e-9);
  }

  Vec3 direction{0.0, 0.0, 1.0};
  double magnitude = 1.0;
  if (config.contains("k0p")) {
    const json& k = object_at(config, "k0p", "");
    check_keys(k, {"direction", "magnitude_keg"}, "k0p");
    if (k.contains("direction")) direction = unit_vec3(k.at("direction"), "k0p.direction");
    magnitude = k.contains("magnitude_keg") ? positive(k, "magnitude_keg", "k0p") : 1.0;
  }
  c.k0p = WaveVector(direction * magnitude);

  if (config.contains("dipole_axis"))
    c.axis = radiative::DipoleAxis(unit_vec3(config.at("dipole_axis"), "dipole_axis"));
  const std::string mode = string_or(config, "kernel_mode", "real_only", "");
  try {
    c.mode = radiative::parse_kernel_mode(mode);
  } catch (const InvalidArgument&) {
    fail("kernel_mode", "expected real_only or complex, got '" + mode + "'");
  }
  return c;
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::v_nn:
      return "v_nn";
    case CouplingKind::v_down:
      return "v_down";
    case CouplingKind::v_ground:
      return "v_ground";
    case CouplingKind::s_sum:
      return "s_sum";
    case CouplingKind::nonsym_aggregate:
      return "nonsym_aggregate";
  }
  return "unknown";
}

namespace {

CouplingKind parse_kind(const std::string& s, const std::string& where) {
  for (auto k : {CouplingKind::v_nn, CouplingKind::v_down, CouplingKind::v_ground,
                 CouplingKind::s_sum, CouplingKind::nonsym_aggregate})
    if (to_string(k) == s) return k;
  fail(where, "unknown coupling kind '" + s + "'");
}

Normalization parse_normalization(const std::string& s, const std::string& where) {
  if (s == "none") return Normalization::none;
  if (s == "max") return Normalization::max;
  if (s == "sym_peak") return Normalization::sym_peak;
  fail(where, "expected none, max or sym_peak, got '" + s + "'");
}

ScanSpec parse_scan(const json& s) {
  const std::string where = "coupling_map.scan";
  ScanSpec out;
  const std::string type = string(s, "type", where);
  if (type == "cut") {
    check_keys(s, {"type", "k1_min_keg", "k1_max_keg", "points"}, where);
    out.type = ScanType::cut;
  } else if (type == "patch") {
    check_keys(s, {"type", "k1_min_keg", "k1_max_keg", "k2_min_keg", "k2_max_keg", "points_1",
                   "points_2"},
               where);
    out.type = ScanType::patch;
  } else {
    fail(join(where, "type"), "expected cut or patch, got '" + type + "'");
  }
  out.a_min = number(s, "k1_min_keg", where);
  out.a_max = number(s, "k1_max_keg", where);
  if (!(out.a_max >= out.a_min)) fail(where, "k1_max_keg must not be below k1_min_keg");
  if (out.type == ScanType::cut) {
    out.points_a = unsigned_int(s, "points", where);
  } else {
    out.b_min = number(s, "k2_min_keg", where);
    out.b_max = number(s, "k2_max_keg", where);
    if (!(out.b_max >= out.b_min)) fail(where, "k2_max_keg must not be below k2_min_keg");
    out.points_a = unsigned_int(s, "points_1", where);
    out.points_b = unsigned_int(s, "points_2", where);
  }
  if (out.points_a == 0 || out.points_b == 0) fail(where, "point counts must be positive");
  if (out.points_a * out.points_b > 100'000'000) fail(where, "scan too large");
  return out;
}

bool safe_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '_' || ch == '-';
  });
}

std::vector<CouplingEntry> default_couplings() {
  return {
      {"sym", CouplingKind::v_nn, 1, 0, 0, Normalization::sym_peak},
      {"nonsym_aggregate", CouplingKind::nonsym_aggregate, 1, 0, 0, Normalization::sym_peak},
      {"ground", CouplingKind::v_ground, 1, 0, 0, Normalization::sym_peak},
  };
}

}  // namespace

CouplingMapSpec parse_coupling_map(const json& config) {
  if (!config.contains("coupling_map")) fail("coupling_map", "missing");
  const json& m = object_at(config, "coupling_map", "");
  check_keys(m, {"scan", "couplings"}, "coupling_map");
  CouplingMapSpec out;
  if (!m.contains("scan")) fail("coupling_map.scan", "missing");
  out.scan = parse_scan(object_at(m, "scan", "coupling_map"));
  if (!m.contains("couplings")) {
    out.couplings = default_couplings();
    return out;
  }
  const json& list = m.at("couplings");
  if (!list.is_array() || list.empty())
    fail("coupling_map.couplings", "expected a non-empty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "coupling_map.couplings[" + std::to_string(i) + "]";
    const json& c = list[i];
    if (!c.is_object()) fail(where, "expected an object");
    check_keys(c, {"name", "kind", "n", "ell", "ell_prime", "normalize"}, where);
    CouplingEntry e;
    e.kind = parse_kind(string(c, "kind", where), join(where, "kind"));
    e.name = string_or(c, "name", to_string(e.kind), where);
    if (!safe_name(e.name)) fail(join(where, "name"), "use letters, digits, '_' or '-'");
    if (!names.insert(e.name).second) fail(join(where, "name"), "duplicate name '" + e.name + "'");
    const auto n = unsigned_or(c, "n", 1, where);
    if (n < 1 || n > 64) fail(join(where, "n"), "must be in 1..64");
    e.n = static_cast<unsigned>(n);
    e.ell = unsigned_or(c, "ell", 0, where);
    e.ell_prime = unsigned_or(c, "ell_prime", 0, where);
    e.normalize = parse_normalization(string_or(c, "normalize", "none", where),
                                      join(where, "normalize"));
    if (e.kind == CouplingKind::v_down && e.n < 2) fail(join(where, "n"), "v_down needs n >= 2");
    if (e.kind == CouplingKind::s_sum && e.ell == 0) fail(join(where, "ell"), "s_sum needs ell >= 1");
    if (e.kind == CouplingKind::s_sum && e.normalize == Normalization::sym_peak)
      fail(join(where, "normalize"), "sym_peak is not defined for s_sum");
    if (e.kind == CouplingKind::nonsym_aggregate && e.n != 1)
      fail(join(where, "n"), "nonsym_aggregate is available for n = 1 only");
    out.couplings.push_back(e);
  }
  return out;
}

std::optional<dynamics::PulseProfile> parse_pulse(const json& config) {
  if (!config.contains("pulse")) return std::nullopt;
  const json& p = object_at(config, "pulse", "");
  check_keys(p, {"shape", "mean_rabi_over_gamma"}, "pulse");
  const std::string shape = string_or(p, "shape", "square", "pulse");
  dynamics::PulseShape s;
  try {
    s = dynamics::parse_pulse_shape(shape);
  } catch (const InvalidArgument&) {
    fail("pulse.shape", "expected square or sin2, got '" + shape + "'");
  }
  return dynamics::PulseProfile(s, positive(p, "mean_rabi_over_gamma", "pulse"));
}

std::vector<double> parse_times(const json& config) {
  if (!config.contains("times")) fail("times", "missing");
  const json& t = object_at(config, "times", "");
  check_keys(t, {"t_max_times_gamma", "samples", "values_times_gamma"}, "times");
  std::vector<double> out;
  if (t.contains("values_times_gamma")) {
    if (t.contains("t_max_times_gamma") || t.contains("samples"))
      fail("times", "give either values_times_gamma or t_max_times_gamma with samples");
    out = number_list(t.at("values_times_gamma"), "times.values_times_gamma");
  } else {
    const double t_max = positive(t, "t_max_times_gamma", "times");
    const auto samples = unsigned_int(t, "samples", "times");
    if (samples < 2) fail("times.samples", "must be at least 2");
    for (std::uint64_t i = 0; i < samples; ++i)
      out.push_back(t_max * static_cast<double>(i) / static_cast<double>(samples - 1));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) fail("times", "times must be non-negative");
    if (i > 0 && !(out[i] > out[i - 1])) fail("times", "times must be strictly increasing");
  }
  return out;
}

GridSpec parse_grid(const json& config) {
  GridSpec g;
  if (!config.contains("mode_grid")) return g;
  const std::string where = "mode_grid";
  const json& m = object_at(config, "mode_grid", "");
  check_keys(m, {"directions", "n_theta", "n_phi", "list", "detuning_points",
                 "detuning_half_width_over_re_gamma_n"},
             where);
  const std::string dirs = string_or(m, "directions", "phase_matched", where);
  if (dirs == "phase_matched") {
    g.directions = DirectionSet::phase_matched;
  } else if (dirs == "sphere") {
    g.directions = DirectionSet::sphere;
    const auto nt = unsigned_int(m, "n_theta", where);
    const auto np = unsigned_int(m, "n_phi", where);
    if (nt == 0 || np == 0 || nt > 4096 || np > 4096)
      fail(where, "n_theta and n_phi must be in 1..4096");
    g.n_theta = static_cast<unsigned>(nt);
    g.n_phi = static_cast<unsigned>(np);
  } else if (dirs == "list") {
    g.directions = DirectionSet::list;
    if (!m.contains("list") || !m.at("list").is_array() || m.at("list").empty())
      fail(join(where, "list"), "expected a non-empty list of directions");
    for (std::size_t i = 0; i < m.at("list").size(); ++i)
      g.list.push_back(unit_vec3(m.at("list")[i], where + ".list[" + std::to_string(i) + "]"));
  } else {
    fail(join(where, "directions"), "expected phase_matched, sphere or list");
  }
  if (g.directions != DirectionSet::sphere && (m.contains("n_theta") || m.contains("n_phi")))
    fail(where, "n_theta/n_phi only apply to sphere directions");
  if (g.directions != DirectionSet::list && m.contains("list"))
    fail(join(where, "list"), "only applies to list directions");
  g.detuning_points = unsigned_or(m, "detuning_points", 512, where);
  if (g.detuning_points < 2) fail(join(where, "detuning_points"), "must be at least 2");
  if (m.contains("detuning_half_width_over_re_gamma_n"))
    g.half_width_over_re_gamma = positive(m, "detuning_half_width_over_re_gamma_n", where);
  return g;
}

SpectrumSpec parse_spectrum(const json& config) {
  SpectrumSpec s;
  if (!config.contains("spectrum")) return s;
  const json& j = object_at(config, "spectrum", "");
  check_keys(j, {"t_times_gamma", "normalize_peak"}, "spectrum");
  if (j.contains("t_times_gamma")) {
    const json& t = j.at("t_times_gamma");
    if (t.is_string() && t.get<std::string>() == "inf") {
      s.t = std::numeric_limits<double>::infinity();
    } else {
      s.t = number(j, "t_times_gamma", "spectrum");
      if (s.t < 0.0) fail("spectrum.t_times_gamma", "must be non-negative or \"inf\"");
    }
  }
  s.normalize_peak = boolean_or(j, "normalize_peak", false, "spectrum");
  return s;
}

DynamicsSpec parse_dynamics(const json& config) {
  DynamicsSpec d;
  if (!config.contains("dynamics")) return d;
  const json& j = object_at(config, "dynamics", "");
  check_keys(j, {"ode_oracle", "rtol", "atol"}, "dynamics");
  d.ode_oracle = boolean_or(j, "ode_oracle", false, "dynamics");
  if (j.contains("rtol")) d.rtol = positive(j, "rtol", "dynamics");
  if (j.contains("atol")) d.atol = positive(j, "atol", "dynamics");
  return d;
}

dephasing::InteractionModel parse_interaction(const json& config) {
  if (!config.contains("interaction")) return dephasing::NoInteraction{};
  const std::string where = "interaction";
  const json& j = object_at(config, "interaction", "");
  const std::string model = string(j, "model", where);
  dephasing::InteractionModel out;
  if (model == "none") {
    check_keys(j, {"model"}, where);
    out = dephasing::NoInteraction{};
  } else if (model == "vdw") {
    check_keys(j, {"model", "c6_keg6"}, where);
    out = dephasing::VanDerWaals{number(j, "c6_keg6", where)};
  } else if (model == "dipolar") {
    check_keys(j, {"model", "c3_keg3"}, where);
    out = dephasing::Dipolar{number(j, "c3_keg3", where)};
  } else if (model == "iid_uniform") {
    check_keys(j, {"model", "width_rad"}, where);
    out = dephasing::IidUniform{number_or(j, "width_rad", 2.0 * std::numbers::pi, where)};
  } else {
    fail(join(where, "model"), "expected none, vdw, dipolar or iid_uniform, got '" + model + "'");
  }
  dephasing::validate(out);
  return out;
}

dephasing::StateAmplitudes parse_amplitudes(const json& config) {
  if (!config.contains("amplitudes")) return dephasing::StateAmplitudes::truncated_coherent();
  const std::string where = "amplitudes";
  const json& j = object_at(config, "amplitudes", "");
  if (j.contains("preset")) {
    check_keys(j, {"preset"}, where);
    if (string(j, "preset", where) != "truncated_coherent")
      fail(join(where, "preset"), "only truncated_coherent is known");
    return dephasing::StateAmplitudes::truncated_coherent();
  }
  check_keys(j, {"c0", "c1", "c2"}, where);
  cplx c[3];
  const char* keys[] = {"c0", "c1", "c2"};
  for (int i = 0; i < 3; ++i) {
    if (!j.contains(keys[i])) fail(join(where, keys[i]), "missing");
    c[i] = complex_value(j.at(keys[i]), join(where, keys[i]));
  }
  return dephasing::StateAmplitudes(c[0], c[1], c[2]);
}

G2Spec parse_g2(const json& config) {
  G2Spec g;
  if (!config.contains("g2")) return g;
  const json& j = object_at(config, "g2", "");
  check_keys(j, {"storage_times", "overlap_samples"}, "g2");
  if (j.contains("storage_times")) {
    g.storage_times = number_list(j.at("storage_times"), "g2.storage_times");
    for (double t : g.storage_times)
      if (t < 0.0) fail("g2.storage_times", "must be non-negative");
  }
  g.overlap_samples = unsigned_or(j, "overlap_samples", g.overlap_samples, "g2");
  if (g.overlap_samples == 0) fail("g2.overlap_samples", "must be positive");
  return g;
}

}  // namespace spinwave::cli::config
