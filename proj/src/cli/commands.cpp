#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "spinwave/cli.hpp"
#include "spinwave/dephasing.hpp"
#include "spinwave/dicke.hpp"
#include "spinwave/dynamics.hpp"
#include "spinwave/ensemble.hpp"
#include "spinwave/error.hpp"
#include "spinwave/format.hpp"
#include "spinwave/parallel.hpp"
#include "spinwave/radiative.hpp"

namespace spinwave::cli {

namespace {

namespace fs = std::filesystem;

// Seed streams for the random parts that are not atom positions. Large
// constants keep them apart from the per-atom streams 0..N-1.
constexpr std::uint64_t kPhaseStream = 0x7068617365ULL;
constexpr std::uint64_t kOverlapStream = 0x6f7665726c6170ULL;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

// Infinity is not valid JSON.
json time_json(double t) { return std::isinf(t) ? json("inf") : json(t); }

class Csv {
 public:
  explicit Csv(const std::string& header) : text_(header + "\n") {}
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ' ';
      if (v == 0.0) v = 0.0;  // no "-0" in output
      text_ += std::isnan(v) ? std::string("nan") : format_double(v);
      first = false;
    }
    text_ += '\n';
  }
  std::string take() { return std::move(text_); }

 private:
  std::string text_;
};

class Outputs {
 public:
  void add(std::string name, std::string contents) {
    files_.emplace_back(std::move(name), std::move(contents));
  }
  void add(std::string name, const json& j) { add(std::move(name), j.dump(2) + "\n"); }
  std::vector<std::string> write(const fs::path& dir) const {
    std::vector<std::string> names;
    for (const auto& [name, contents] : files_) {
      write_file_atomically(dir / name, contents);
      names.push_back(name);
    }
    return names;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

AtomicEnsemble build_ensemble(const config::EnsembleSpec& s) {
  if (s.file) return load_ensemble(*s.file);
  return generate_ensemble(*s.geometry, *s.count, s.seed, s.units);
}

json ensemble_json(const AtomicEnsemble& e) {
  return {{"atoms", e.size()},
          {"seed", e.seed()},
          {"geometry", e.geometry().describe()},
          {"density_per_cm3", e.density_per_cm3()},
          {"wavelength_nm", e.units().wavelength() * 1e9},
          {"content_hash", hex64(e.content_hash())}};
}

void warn(std::ostream& log, json& warnings, const std::string& message) {
  log << "warning: " << message << "\n";
  warnings.push_back(message);
}

// Orthonormal frame with e3 along k'0; for k'0 along z, e1 = x and e2 = y.
struct Frame {
  Vec3 e1, e2, e3;
};

Frame frame_about(const Vec3& axis) {
  const Vec3 e3 = axis / norm(axis);
  const Vec3 helper = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = helper - e3 * dot(helper, e3);
  e1 = e1 / norm(e1);
  return {e1, cross(e3, e1), e3};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

// ---------------------------------------------------------------- ensemble

std::vector<std::string> cmd_ensemble(const json& cfg, const fs::path& out, std::ostream&) {
  const auto common = config::parse_common(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  Outputs o;
  o.add("ensemble.txt", format_ensemble(e));
  o.add("ensemble.json", ensemble_json(e));
  return o.write(out);
}

// ---------------------------------------------------------------- gamma

std::vector<std::string> cmd_gamma(const json& cfg, const fs::path& out, unsigned threads,
                                   std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const auto rate = radiative::gamma_n(e, common.k0p, common.axis, common.mode, threads);
  json warnings = json::array();
  for (const auto& w : rate.warnings) warn(log, warnings, w);
  json j = {{"N", e.size()},
            {"geometry", e.geometry().describe()},
            {"seed", e.seed()},
            {"re_gamma_over_Gamma", rate.value.real()},
            {"im_gamma_over_Gamma", rate.value.imag()},
            {"mode", radiative::to_string(rate.mode)},
            {"near_zone_pairs", rate.near_zone_pairs},
            {"coincident_pairs", rate.coincident_pairs},
            {"ensemble_hash", hex64(e.content_hash())},
            {"warnings", warnings}};
  Outputs o;
  o.add("gamma.json", j);
  return o.write(out);
}

// ---------------------------------------------------------------- coupling-map

double sym_peak(const dicke::Couplings& c, const config::CouplingEntry& entry) {
  using K = config::CouplingKind;
  const WaveVector& k0p = c.k0p();
  switch (entry.kind) {
    case K::v_nn:
      return std::abs(c.v_nn(entry.n, 0, 0, k0p));
    case K::v_down:
      return std::abs(c.v_down(entry.n, 0, 0, k0p));
    case K::v_ground:
      return std::abs(c.v_ground(0, k0p));
    case K::nonsym_aggregate:
      return std::abs(c.v_nn(1, 0, 0, k0p));
    case K::s_sum:
      break;
  }
  throw InvalidArgument("sym_peak is not defined for " + config::to_string(entry.kind));
}

cplx coupling_value(const dicke::Couplings& c, const config::CouplingEntry& entry,
                    const WaveVector& k) {
  using K = config::CouplingKind;
  switch (entry.kind) {
    case K::v_nn:
      return c.v_nn(entry.n, entry.ell, entry.ell_prime, k);
    case K::v_down:
      return c.v_down(entry.n, entry.ell, entry.ell_prime, k);
    case K::v_ground:
      return c.v_ground(entry.ell, k);
    case K::s_sum:
      return c.s_sum(entry.n, entry.ell, c.k0p().components() - k.components());
    case K::nonsym_aggregate: {
      const auto row = c.v11_row(k);
      double sum = 0.0;
      for (std::size_t l = 1; l < row.size(); ++l) sum += std::abs(row[l]);
      return {sum, 0.0};
    }
  }
  return {};
}

std::string to_string(config::Normalization n) {
  switch (n) {
    case config::Normalization::none:
      return "none";
    case config::Normalization::max:
      return "max";
    case config::Normalization::sym_peak:
      return "sym_peak";
  }
  return "none";
}

std::vector<std::string> cmd_coupling_map(const json& cfg, const fs::path& out, unsigned threads,
                                          std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const auto spec = config::parse_coupling_map(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const dicke::Couplings c(e, common.k0p);
  const Frame f = frame_about(common.k0p.components());
  const double m = common.k0p.magnitude();
  json warnings = json::array();

  const auto as = linspace(spec.scan.a_min, spec.scan.a_max, spec.scan.points_a);
  const auto bs = spec.scan.type == config::ScanType::cut
                      ? std::vector<double>{0.0}
                      : linspace(spec.scan.b_min, spec.scan.b_max, spec.scan.points_b);
  std::vector<WaveVector> ks;
  std::size_t dropped = 0;
  for (double b : bs)
    for (double a : as) {
      const double perp2 = a * a + b * b;
      if (perp2 > m * m * (1.0 + 1e-12)) {
        ++dropped;
        continue;
      }
      ks.emplace_back(f.e1 * a + f.e2 * b + f.e3 * std::sqrt(std::max(0.0, m * m - perp2)));
    }
  if (dropped > 0)
    warn(log, warnings,
         "scan clipped to the shell |k| = |k'0|: " + std::to_string(dropped) +
             " points outside it were dropped");
  if (ks.empty()) throw InvalidArgument("coupling-map: no scan point lies on the shell");

  // values[entry][point]
  std::vector<std::vector<cplx>> values(spec.couplings.size(), std::vector<cplx>(ks.size()));
  parallel_for(ks.size(), threads, [&](std::size_t p) {
    for (std::size_t i = 0; i < spec.couplings.size(); ++i)
      values[i][p] = coupling_value(c, spec.couplings[i], ks[p]);
  });

  Outputs o;
  for (std::size_t i = 0; i < spec.couplings.size(); ++i) {
    const auto& entry = spec.couplings[i];
    double max_abs = 0.0;
    for (const cplx& v : values[i]) max_abs = std::max(max_abs, std::abs(v));
    double factor = 1.0;
    if (entry.normalize == config::Normalization::sym_peak) factor = sym_peak(c, entry);
    if (entry.normalize == config::Normalization::max && max_abs > 0.0) factor = max_abs;
    if (!(factor > 0.0)) throw NumericError("coupling-map: zero normalization for " + entry.name);

    Csv csv("kx ky kz re im |v|");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t p = 0; p < ks.size(); ++p) {
      const cplx v = values[i][p] / factor;
      const Vec3& k = ks[p].components();
      csv.row({k.x, k.y, k.z, v.real(), v.imag(), std::abs(v)});
      lo = std::min(lo, std::abs(v));
      hi = std::max(hi, std::abs(v));
    }
    o.add("map_" + entry.name + ".csv", csv.take());
    json side = {{"name", entry.name},
                 {"kind", config::to_string(entry.kind)},
                 {"n", entry.n},
                 {"ell", entry.ell},
                 {"ell_prime", entry.ell_prime},
                 {"normalize", to_string(entry.normalize)},
                 {"normalization_factor", factor},
                 {"min_abs", lo},
                 {"max_abs", hi},
                 {"points", ks.size()},
                 {"dropped_points", dropped},
                 {"k0p", vec_json(common.k0p.components())},
                 {"scan_e1", vec_json(f.e1)},
                 {"scan_e2", vec_json(f.e2)},
                 {"ensemble", ensemble_json(e)},
                 {"warnings", warnings}};
    o.add("map_" + entry.name + ".json", side);
  }
  return o.write(out);
}

// ---------------------------------------------------------------- dynamics

json pulse_json(const std::optional<dynamics::PulseProfile>& pulse) {
  if (!pulse) return {{"shape", "instantaneous"}};
  return {{"shape", dynamics::to_string(pulse->shape())},
          {"mean_rabi_over_gamma", pulse->mean_rabi()},
          {"duration_times_gamma", pulse->duration()}};
}

std::vector<std::string> cmd_dynamics(const json& cfg, const fs::path& out, unsigned threads,
                                      std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const auto times = config::parse_times(cfg);
  const auto pulse = config::parse_pulse(cfg);
  const auto dyn = config::parse_dynamics(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const auto rate = radiative::gamma_n(e, common.k0p, common.axis, common.mode, threads);
  const cplx gamma = rate.value;
  json warnings = json::array();
  for (const auto& w : rate.warnings) warn(log, warnings, w);

  dynamics::AmplitudeTrace trace;
  json meta = {{"gamma_n", cplx_json(gamma)}, {"pulse", pulse_json(pulse)}};
  if (pulse) {
    trace = dynamics::e0_of_t(*pulse, gamma, times);
    const auto v = dynamics::validity_check(*pulse, gamma);
    meta["validity"] = {
        {"ok", v.ok}, {"ratio", v.ratio}, {"threshold", dynamics::kValidityThreshold}};
    if (!v.ok)
      warn(log, warnings,
           "pulse is not short compared with the collective decay: Re(Gamma_N) T / 2 = " +
               format_double(v.ratio));
  } else {
    trace.t = times;
    for (double t : times) trace.value.push_back(std::exp(-gamma * t / 2.0));
  }

  Outputs o;
  Csv csv("t re im");
  for (std::size_t i = 0; i < trace.t.size(); ++i)
    csv.row({trace.t[i], trace.value[i].real(), trace.value[i].imag()});
  o.add("e0.csv", csv.take());

  if (dyn.ode_oracle) {
    dynamics::OdeOptions opts;
    opts.rtol = dyn.rtol;
    opts.atol = dyn.atol;
    opts.mode = common.mode;
    opts.threads = threads;
    std::vector<double> grid = times;
    if (grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
    const auto r = dynamics::single_exc_ode_oracle(e, common.k0p, common.axis, pulse, grid, opts);
    const std::size_t skip = grid.size() - times.size();
    Csv sym("t re im");
    Csv norm("t norm2 leakage");
    double max_dev = 0.0;
    for (std::size_t i = skip; i < r.t.size(); ++i) {
      sym.row({r.t[i], r.symmetric[i].real(), r.symmetric[i].imag()});
      norm.row({r.t[i], r.norm2[i], r.leakage[i]});
      max_dev = std::max(max_dev, std::abs(r.symmetric[i] - trace.value[i - skip]));
    }
    o.add("oracle.csv", sym.take());
    o.add("oracle_norm.csv", norm.take());
    meta["oracle"] = {{"initial_slope", cplx_json(r.initial_slope)},
                      {"max_abs_deviation_from_e0", max_dev},
                      {"rtol", dyn.rtol},
                      {"atol", dyn.atol}};
  }
  meta["ensemble"] = ensemble_json(e);
  meta["warnings"] = warnings;
  o.add("dynamics.json", meta);
  return o.write(out);
}

// ---------------------------------------------------------------- spectrum / cascade

dynamics::ModeGrid build_grid(const config::GridSpec& g, const config::Common& common,
                              cplx gamma) {
  std::vector<dynamics::Direction> dirs;
  const Vec3 axis = common.k0p.components() / common.k0p.magnitude();
  switch (g.directions) {
    case config::DirectionSet::phase_matched:
      dirs.push_back({axis, 1.0});
      break;
    case config::DirectionSet::sphere:
      dirs = dynamics::ModeGrid::sphere(g.n_theta, g.n_phi, axis);
      break;
    case config::DirectionSet::list:
      for (const Vec3& d : g.list) dirs.push_back({d, 1.0});
      break;
  }
  if (!(gamma.real() > 0.0)) throw NumericError("collective rate is not positive");
  auto det = dynamics::ModeGrid::detuning_grid(g.half_width_over_re_gamma * gamma.real(),
                                               g.detuning_points);
  auto w = dynamics::ModeGrid::trapezoid_weights(det);
  return dynamics::ModeGrid(std::move(dirs), std::move(det), std::move(w), common.axis);
}

json grid_json(const config::GridSpec& g, const dynamics::ModeGrid& grid) {
  const char* names[] = {"phase_matched", "sphere", "list"};
  return {{"directions", names[static_cast<int>(g.directions)]},
          {"direction_count", grid.directions().size()},
          {"detuning_points", grid.detunings().size()},
          {"detuning_half_width_over_gamma", grid.detunings().back()}};
}

std::vector<std::string> cmd_spectrum(const json& cfg, const fs::path& out, unsigned threads,
                                      std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const auto gspec = config::parse_grid(cfg);
  const auto sspec = config::parse_spectrum(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const auto rate = radiative::gamma_n(e, common.k0p, common.axis, common.mode, threads);
  json warnings = json::array();
  for (const auto& w : rate.warnings) warn(log, warnings, w);
  const auto grid = build_grid(gspec, common, rate.value);
  const auto samples = dynamics::emission_spectrum(e, common.k0p, rate.value, grid, sspec.t,
                                                   sspec.normalize_peak, threads);

  Csv csv("delta_omega direction_x direction_y direction_z intensity");
  for (const auto& s : samples)
    csv.row({s.detuning, s.direction.x, s.direction.y, s.direction.z, s.intensity});

  // Lorentzian fit along the grid direction closest to k'0.
  const Vec3 axis = common.k0p.components() / common.k0p.magnitude();
  std::size_t best = 0;
  for (std::size_t d = 1; d < grid.directions().size(); ++d)
    if (dot(grid.directions()[d].k, axis) > dot(grid.directions()[best].k, axis)) best = d;
  const std::size_t nd = grid.detunings().size();
  std::vector<double> y(nd);
  for (std::size_t j = 0; j < nd; ++j) y[j] = samples[best * nd + j].intensity;
  json fit = nullptr;
  try {
    const auto f = dynamics::fit_lorentzian(grid.detunings(), y);
    fit = {{"direction", vec_json(grid.directions()[best].k)},
           {"fwhm_over_gamma", f.fwhm},
           {"fwhm_over_re_gamma_n", f.fwhm / rate.value.real()},
           {"center_over_gamma", f.center},
           {"amplitude", f.amplitude},
           {"rms_residual", f.rms_residual}};
  } catch (const std::exception& ex) {
    warn(log, warnings, std::string("lorentzian fit failed: ") + ex.what());
  }

  json meta = {{"gamma_n", cplx_json(rate.value)},
               {"t_times_gamma", time_json(sspec.t)},
               {"normalize_peak", sspec.normalize_peak},
               {"grid", grid_json(gspec, grid)},
               {"fit", fit},
               {"ensemble", ensemble_json(e)},
               {"warnings", warnings}};
  Outputs o;
  o.add("spectrum.csv", csv.take());
  o.add("spectrum.json", meta);
  return o.write(out);
}

std::vector<std::string> cmd_cascade(const json& cfg, const fs::path& out, unsigned threads,
                                     std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const auto gspec = config::parse_grid(cfg);
  const auto times = config::parse_times(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const auto rate = radiative::gamma_n(e, common.k0p, common.axis, common.mode, threads);
  json warnings = json::array();
  for (const auto& w : rate.warnings) warn(log, warnings, w);
  const auto grid = build_grid(gspec, common, rate.value);
  const auto r = dynamics::cascade_two_photon(e, common.k0p, rate.value, grid, times, threads);

  const std::size_t nd = grid.detunings().size();
  Csv modes("mode direction_x direction_y direction_z delta_omega measure");
  for (std::size_t d = 0; d < grid.directions().size(); ++d)
    for (std::size_t j = 0; j < nd; ++j) {
      const Vec3& k = grid.directions()[d].k;
      modes.row({static_cast<double>(d * nd + j), k.x, k.y, k.z, grid.detunings()[j],
                 grid.measure(d, j)});
    }
  Csv e02("t re im");
  for (std::size_t i = 0; i < r.e02.t.size(); ++i)
    e02.row({r.e02.t[i], r.e02.value[i].real(), r.e02.value[i].imag()});
  Csv ephi("mode t re im");
  for (std::size_t m = 0; m < r.ephi0.size(); ++m)
    for (std::size_t i = 0; i < r.ephi0[m].t.size(); ++i)
      ephi.row({static_cast<double>(m), r.ephi0[m].t[i], r.ephi0[m].value[i].real(),
                r.ephi0[m].value[i].imag()});
  Csv gpp("mode mode_prime re im");
  for (Eigen::Index a = 0; a < r.g_asymptotic.rows(); ++a)
    for (Eigen::Index b = 0; b < r.g_asymptotic.cols(); ++b)
      gpp.row({static_cast<double>(a), static_cast<double>(b), r.g_asymptotic(a, b).real(),
               r.g_asymptotic(a, b).imag()});

  json meta = {{"gamma_n", cplx_json(rate.value)},
               {"grid", grid_json(gspec, grid)},
               {"modes", grid.size()},
               {"times", times.size()},
               {"ensemble", ensemble_json(e)},
               {"warnings", warnings}};
  Outputs o;
  o.add("modes.csv", modes.take());
  o.add("e02.csv", e02.take());
  o.add("ephi0.csv", ephi.take());
  o.add("gphiphi.csv", gpp.take());
  o.add("cascade.json", meta);
  return o.write(out);
}

// ---------------------------------------------------------------- g2

std::vector<std::string> cmd_g2(const json& cfg, const fs::path& out, unsigned,
                                std::ostream& log) {
  const auto common = config::parse_common(cfg);
  const auto model = config::parse_interaction(cfg);
  const auto amps = config::parse_amplitudes(cfg);
  const auto spec = config::parse_g2(cfg);
  const AtomicEnsemble e = build_ensemble(common.ensemble);
  const std::uint64_t phase_seed = derive_seed(common.ensemble.seed, kPhaseStream);
  dephasing::OverlapOptions opts;
  opts.samples = spec.overlap_samples;
  opts.seed = derive_seed(common.ensemble.seed, kOverlapStream);
  json warnings = json::array();
  const bool has_asymptote = std::abs(amps.c1) > 0.0;
  if (!has_asymptote) warn(log, warnings, "c1 = 0: the long-time form is undefined, written as nan");

  Csv csv("T g2 g2_asymptotic overlap_sym_re overlap_sym_im");
  bool exact = true;
  for (double T : spec.storage_times) {
    const auto phi = dephasing::phase_matrix(e, model, T, phase_seed);
    const double g2 = dephasing::g2_of_T(amps, phi);
    const double g2a = has_asymptote ? dephasing::g2_asymptotic(amps, phi)
                                     : std::numeric_limits<double>::quiet_NaN();
    const auto ov = dephasing::overlap_symmetric(phi, 2, opts);
    exact = exact && ov.exact;
    csv.row({T, g2, g2a, ov.value.real(), ov.value.imag()});
  }
  json meta = {{"model", dephasing::describe(model)},
               {"amplitudes",
                {{"c0", cplx_json(amps.c0)}, {"c1", cplx_json(amps.c1)}, {"c2", cplx_json(amps.c2)}}},
               {"g2_zero", dephasing::g2_zero(amps)},
               {"seed", common.ensemble.seed},
               {"phase_seed", phase_seed},
               {"overlap_seed", opts.seed},
               {"overlap_samples", opts.samples},
               {"overlap_exact", exact},
               {"ensemble", ensemble_json(e)},
               {"warnings", warnings}};
  Outputs o;
  o.add("g2.csv", csv.take());
  o.add("g2.json", meta);
  return o.write(out);
}

}  // namespace

std::vector<std::string> run_command(const std::string& command, const json& config,
                                     const std::filesystem::path& out, unsigned threads,
                                     std::ostream& log) {
  if (command == "ensemble") return cmd_ensemble(config, out, log);
  if (command == "gamma") return cmd_gamma(config, out, threads, log);
  if (command == "coupling-map") return cmd_coupling_map(config, out, threads, log);
  if (command == "dynamics") return cmd_dynamics(config, out, threads, log);
  if (command == "spectrum") return cmd_spectrum(config, out, threads, log);
  if (command == "cascade") return cmd_cascade(config, out, threads, log);
  if (command == "g2") return cmd_g2(config, out, threads, log);
  throw InvalidArgument("unknown command '" + command + "'");
}

}  // namespace spinwave::cli
