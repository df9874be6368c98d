#include "spinwave/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "spinwave/error.hpp"
#include "spinwave/format.hpp"
#include "spinwave/parallel.hpp"
#include "spinwave/simd/kernels.hpp"

#ifndef SPINWAVE_VERSION
#define SPINWAVE_VERSION "0.0.0"
#endif

namespace spinwave::cli {

namespace fs = std::filesystem;

json load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config: " + path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("ensemble_file") && j["ensemble_file"].is_string()) {
    fs::path f = j["ensemble_file"].get<std::string>();
    if (f.is_relative()) j["ensemble_file"] = (path.parent_path() / f).lexically_normal().string();
  }
  validate_config(j);
  return j;
}

void validate_config(const json& config) {
  config::parse_common(config);
  if (config.contains("coupling_map")) config::parse_coupling_map(config);
  if (config.contains("times")) config::parse_times(config);
  config::parse_pulse(config);
  config::parse_grid(config);
  config::parse_spectrum(config);
  config::parse_dynamics(config);
  config::parse_interaction(config);
  config::parse_amplitudes(config);
  config::parse_g2(config);
}

std::string canonical_json(const json& config) { return config.dump(); }

std::uint64_t config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

json::json_pointer pointer_for(const std::string& key) {
  std::string p;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    p += "/" + key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(p);
}

}  // namespace

SweepAxis parse_sweep(const std::string& spec, const json& config) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw InvalidArgument("sweep: expected key=v1,v2,... in '" + spec + "'");
  SweepAxis axis;
  axis.key = trim(std::string_view(spec).substr(0, eq));
  if (axis.key.empty()) throw InvalidArgument("sweep: empty key");
  const auto ptr = pointer_for(axis.key);
  if (!config.contains(ptr))
    throw InvalidArgument("sweep: key '" + axis.key + "' is not present in the config");
  const json& current = config.at(ptr);
  if (!current.is_number())
    throw InvalidArgument("sweep: key '" + axis.key + "' is not numeric");
  const bool integral = current.is_number_integer();

  std::string_view rest = std::string_view(spec).substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || p != item.data() + item.size() || !std::isfinite(v))
      throw InvalidArgument("sweep: '" + item + "' is not a number (key " + axis.key + ")");
    if (integral) {
      if (v != std::floor(v) || v < 0.0 || v > 9.0e15)
        throw InvalidArgument("sweep: key '" + axis.key + "' needs non-negative integers");
      axis.values.emplace_back(static_cast<std::uint64_t>(v));
    } else {
      axis.values.emplace_back(v);
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return axis;
}

json sweep_point(const json& base, const std::vector<SweepAxis>& axes, std::size_t index) {
  json cfg = base;
  std::size_t rem = index;
  bool seed_swept = false;
  for (std::size_t a = axes.size(); a-- > 0;) {
    const std::size_t n = axes[a].values.size();
    cfg[pointer_for(axes[a].key)] = axes[a].values[rem % n];
    rem /= n;
    seed_swept = seed_swept || axes[a].key == "seed";
  }
  if (!seed_swept) cfg["seed"] = derive_seed(base.at("seed").get<std::uint64_t>(), index);
  return cfg;
}

namespace {

void run_point(const std::string& command, const json& cfg, const fs::path& out, unsigned threads,
               std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  auto files = run_command(command, cfg, out, threads, log);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json run = {{"command", command},
              {"config", cfg},
              {"config_hash", hex64(config_hash(cfg))},
              {"version", SPINWAVE_VERSION},
              {"isa", std::string(simd::isa_name(simd::kernels().isa))},
              {"threads", threads},
              {"files", files},
              {"wall_time_s", wall}};
  write_file_atomically(out / "run.json", run.dump(2) + "\n");
}

int report(std::ostream& log, int code, const char* kind, const char* what) {
  log << kind << ": " << what << "\n";
  return code;
}

}  // namespace

int execute(const Invocation& inv, std::ostream& log) {
  try {
    if (std::find(std::begin(kCommands), std::end(kCommands), inv.command) == std::end(kCommands))
      throw InvalidArgument("unknown command '" + inv.command + "'");
    const json cfg = load_config(inv.config);
    std::vector<SweepAxis> axes;
    for (const auto& s : inv.sweeps) axes.push_back(parse_sweep(s, cfg));
    const unsigned threads = inv.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                              : inv.threads;
    set_default_threads(threads);

    if (axes.empty()) {
      run_point(inv.command, cfg, inv.out, threads, log);
      return kExitOk;
    }

    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    std::vector<json> configs;
    for (std::size_t i = 0; i < total; ++i) {
      configs.push_back(sweep_point(cfg, axes, i));
      validate_config(configs.back());
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    const unsigned inner = std::max(1u, threads / workers);
    auto dir_name = [](std::size_t i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "sweep_%03zu", i);
      return std::string(buf);
    };
    std::vector<std::ostringstream> logs(total);
    std::exception_ptr failure;
    try {
      parallel_for(total, workers, [&](std::size_t i) {
        run_point(inv.command, configs[i], inv.out / dir_name(i), inner, logs[i]);
      });
    } catch (...) {
      failure = std::current_exception();
    }
    for (std::size_t i = 0; i < total; ++i)
      if (!logs[i].str().empty()) log << dir_name(i) << ": " << logs[i].str();
    if (failure) std::rethrow_exception(failure);

    json index = {{"command", inv.command}, {"base_config_hash", hex64(config_hash(cfg))}};
    json jaxes = json::array();
    for (const auto& a : axes) jaxes.push_back({{"key", a.key}, {"values", a.values}});
    index["axes"] = jaxes;
    json points = json::array();
    for (std::size_t i = 0; i < total; ++i) {
      json values = json::object();
      for (const auto& a : axes) values[a.key] = configs[i].at(pointer_for(a.key));
      points.push_back({{"index", i},
                        {"dir", dir_name(i)},
                        {"values", values},
                        {"seed", configs[i].at("seed")},
                        {"config_hash", hex64(config_hash(configs[i]))}});
    }
    index["points"] = points;
    write_file_atomically(inv.out / "sweep.json", index.dump(2) + "\n");
    return kExitOk;
  } catch (const NumericError& e) {
    return report(log, kExitNumeric, "numeric error", e.what());
  } catch (const InvalidArgument& e) {
    return report(log, kExitConfig, "error", e.what());
  } catch (const json::exception& e) {
    return report(log, kExitConfig, "error", e.what());
  } catch (const fs::filesystem_error& e) {
    return report(log, kExitConfig, "error", e.what());
  } catch (const std::exception& e) {
    return report(log, kExitInternal, "internal error", e.what());
  }
}

int main(int argc, const char* const* argv) {
  CLI::App app{"spinwave: collective emission from spin waves stored in cold atomic ensembles"};
  app.set_version_flag("--version", SPINWAVE_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Invocation inv;
  app.add_option("--config", inv.config, "JSON config file")->required();
  app.add_option("--out", inv.out, "output directory")->capture_default_str();
  app.add_option("--threads", inv.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--sweep", inv.sweeps, "key=v1,v2,... over a numeric config entry (repeatable)")
      ->allow_extra_args(false);

  const std::pair<const char*, const char*> commands[] = {
      {"ensemble", "generate and save atom positions"},
      {"coupling-map", "coupling strengths over a k-space scan"},
      {"gamma", "collective decay rate"},
      {"dynamics", "symmetric amplitude after the read-out pulse"},
      {"spectrum", "single-photon emission spectrum"},
      {"cascade", "two-photon emission from the doubly excited spin wave"},
      {"g2", "spin-wave g2 under interaction-induced dephasing"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  inv.command = app.get_subcommands().front()->get_name();
  return execute(inv, std::cerr);
}

}  // namespace spinwave::cli
