#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinwave/cli.hpp"
#include "spinwave/ensemble.hpp"
#include "spinwave/error.hpp"

namespace fs = std::filesystem;
using spinwave::cli::json;

namespace {

class Scratch {
 public:
  Scratch() {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("spinwave_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  fs::path config(const std::string& name, const json& j) const {
    std::ofstream(path(name)) << j.dump(2);
    return path(name);
  }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(tok == "nan" ? std::nan("") : std::stod(tok));
    rows.push_back(row);
  }
  return rows;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"spinwave"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return spinwave::cli::main(static_cast<int>(argv.size()), argv.data());
}

int execute(const std::string& cmd, const fs::path& config, const fs::path& out,
            std::vector<std::string> sweeps = {}, unsigned threads = 1, std::string* log = nullptr) {
  spinwave::cli::Invocation inv;
  inv.command = cmd;
  inv.config = config;
  inv.out = out;
  inv.threads = threads;
  inv.sweeps = std::move(sweeps);
  std::ostringstream s;
  const int rc = spinwave::cli::execute(inv, s);
  if (log) *log = s.str();
  return rc;
}

json cube_config() {
  return {{"seed", 2}, {"geometry", {{"shape", "cube"}, {"side_um", 10}}}, {"atoms", 100}};
}

}  // namespace

TEST_CASE("ensemble command writes the requested atoms deterministically") {
  Scratch s;
  const auto cfg = s.config("c.json", cube_config());
  REQUIRE(run({"ensemble", "--config", cfg.string(), "--out", s.path("a").string()}) == 0);
  REQUIRE(run({"ensemble", "--config", cfg.string(), "--out", s.path("b").string()}) == 0);
  const std::string a = slurp(s.path("a") / "ensemble.txt");
  CHECK(a == slurp(s.path("b") / "ensemble.txt"));
  std::size_t rows = 0;
  std::istringstream in(a);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 100);
  const json run_meta = read_json(s.path("a") / "run.json");
  CHECK(run_meta.at("config_hash") == read_json(s.path("b") / "run.json").at("config_hash"));
  CHECK(run_meta.contains("wall_time_s"));
  CHECK(run_meta.contains("version"));
}

TEST_CASE("config errors exit with 2 and write nothing") {
  Scratch s;
  json no_seed = cube_config();
  no_seed.erase("seed");
  CHECK(execute("ensemble", s.config("a.json", no_seed), s.path("o1")) == 2);
  CHECK_FALSE(fs::exists(s.path("o1")));

  json unknown = cube_config();
  unknown["side_um"] = 3;  // belongs inside geometry
  CHECK(execute("ensemble", s.config("b.json", unknown), s.path("o2")) == 2);

  json both = cube_config();
  both["density_per_cm3"] = 1e12;
  CHECK(execute("ensemble", s.config("c.json", both), s.path("o3")) == 2);

  json bad_shape = cube_config();
  bad_shape["geometry"] = {{"shape", "torus"}, {"side_um", 1}};
  CHECK(execute("ensemble", s.config("d.json", bad_shape), s.path("o4")) == 2);

  json nested = cube_config();
  nested["g2"] = {{"storage_times", {0.0}}, {"samples", 3}};
  CHECK(execute("g2", s.config("e.json", nested), s.path("o5")) == 2);

  {
    std::ofstream(s.path("broken.json")) << "{\"seed\": 1,";
  }
  CHECK(execute("gamma", s.path("broken.json"), s.path("o6")) == 2);
  CHECK(execute("gamma", s.path("missing.json"), s.path("o7")) == 2);
  CHECK(run({"nonsense", "--config", s.path("a.json").string()}) == 2);
  CHECK(run({"gamma"}) == 2);
}

TEST_CASE("numeric failure exits with 3 and writes nothing") {
  Scratch s;
  json cfg = {{"seed", 1},
              {"geometry", {{"shape", "sphere"}, {"radius_um", 1}}},
              {"atoms", 20},
              {"times", {{"t_max_times_gamma", 5}, {"samples", 3}}},
              {"dynamics", {{"ode_oracle", true}, {"rtol", 1e-300}, {"atol", 1e-300}}}};
  CHECK(execute("dynamics", s.config("c.json", cfg), s.path("o")) == 3);
  CHECK_FALSE(fs::exists(s.path("o") / "e0.csv"));
}

TEST_CASE("gamma of a single atom is the single-atom rate") {
  Scratch s;
  json cfg = cube_config();
  cfg["atoms"] = 1;
  REQUIRE(execute("gamma", s.config("c.json", cfg), s.path("o")) == 0);
  const json g = read_json(s.path("o") / "gamma.json");
  CHECK(g.at("N") == 1);
  CHECK(g.at("re_gamma_over_Gamma").get<double>() == 1.0);
  CHECK(g.at("im_gamma_over_Gamma").get<double>() == 0.0);
  CHECK(g.at("mode") == "real_only");
  CHECK(g.at("seed") == 2);
  CHECK(g.at("geometry") == "cube:side_um=10");
}

TEST_CASE("g2 without interactions stays at e/4 for truncated coherent amplitudes") {
  Scratch s;
  json cfg = cube_config();
  cfg["interaction"] = {{"model", "none"}};
  cfg["g2"] = {{"storage_times", {0.0, 1.0, 5.0}}};
  REQUIRE(execute("g2", s.config("c.json", cfg), s.path("o")) == 0);
  const auto rows = read_csv(s.path("o") / "g2.csv");
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(std::abs(r[1] - std::numbers::e / 4.0) < 1e-12);
    CHECK(std::abs(r[2] - std::numbers::e) < 1e-12);
    CHECK(std::abs(r[3] - 1.0) < 1e-12);
    CHECK(std::abs(r[4]) < 1e-12);
  }
  const json meta = read_json(s.path("o") / "g2.json");
  CHECK(meta.at("model") == "none");
  CHECK(meta.contains("phase_seed"));
}

TEST_CASE("spectrum half-maximum width matches the collective rate") {
  Scratch s;
  json cfg = {{"seed", 4},
              {"geometry", {{"shape", "sphere"}, {"radius_um", 1.5}}},
              {"atoms", 150},
              {"mode_grid",
               {{"directions", "phase_matched"},
                {"detuning_points", 2049},
                {"detuning_half_width_over_re_gamma_n", 10}}}};
  REQUIRE(execute("spectrum", s.config("c.json", cfg), s.path("o")) == 0);
  const double re_gamma = read_json(s.path("o") / "spectrum.json").at("gamma_n")[0].get<double>();
  CHECK(re_gamma > 2.0);
  const auto rows = read_csv(s.path("o") / "spectrum.csv");
  REQUIRE(rows.size() == 2049);
  // Width from linear interpolation of the half-maximum crossings.
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, r[4]);
  auto crossing = [&](std::size_t i) {
    const double x0 = rows[i][0], x1 = rows[i + 1][0], y0 = rows[i][4], y1 = rows[i + 1][4];
    return x0 + (peak / 2 - y0) * (x1 - x0) / (y1 - y0);
  };
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i][4] < peak / 2 && rows[i + 1][4] >= peak / 2) left = crossing(i);
    if (rows[i][4] >= peak / 2 && rows[i + 1][4] < peak / 2) right = crossing(i);
  }
  CHECK(std::abs((right - left) / re_gamma - 1.0) < 0.02);
  const json fit = read_json(s.path("o") / "spectrum.json").at("fit");
  CHECK(std::abs(fit.at("fwhm_over_re_gamma_n").get<double>() - 1.0) < 0.02);
}

TEST_CASE("coupling map: symmetric peak at k'0, aggregate vanishes there") {
  Scratch s;
  json cfg = cube_config();
  cfg["coupling_map"] = {
      {"scan",
       {{"type", "patch"},
        {"k1_min_keg", -0.2},
        {"k1_max_keg", 0.2},
        {"k2_min_keg", -0.2},
        {"k2_max_keg", 0.2},
        {"points_1", 21},
        {"points_2", 21}}}};
  REQUIRE(execute("coupling-map", s.config("c.json", cfg), s.path("o")) == 0);
  const auto sym = read_csv(s.path("o") / "map_sym.csv");
  const auto agg = read_csv(s.path("o") / "map_nonsym_aggregate.csv");
  REQUIRE(sym.size() == 441);
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < sym.size(); ++i)
    if (sym[i][5] > sym[argmax][5]) argmax = i;
  CHECK(argmax == 220);
  CHECK(sym[220][2] == 1.0);
  CHECK(std::abs(sym[220][5] - 1.0) < 1e-12);
  CHECK(agg[220][5] < 1e-10);
  const json meta = read_json(s.path("o") / "map_sym.json");
  CHECK(meta.at("n") == 1);
  CHECK(meta.at("ell") == 0);
  CHECK(meta.at("ell_prime") == 0);
  CHECK(meta.at("max_abs").get<double>() == doctest::Approx(1.0));
  CHECK(meta.at("ensemble").contains("content_hash"));
}

TEST_CASE("coupling map cut outside the shell is clipped with a warning") {
  Scratch s;
  json cfg = cube_config();
  cfg["coupling_map"] = {
      {"scan", {{"type", "cut"}, {"k1_min_keg", -1.5}, {"k1_max_keg", 1.5}, {"points", 31}}},
      {"couplings", {{{"kind", "v_ground"}, {"normalize", "sym_peak"}}}}};
  std::string log;
  REQUIRE(execute("coupling-map", s.config("c.json", cfg), s.path("o"), {}, 1, &log) == 0);
  CHECK(log.find("clipped") != std::string::npos);
  const auto rows = read_csv(s.path("o") / "map_v_ground.csv");
  CHECK(rows.size() == 21);
  for (const auto& r : rows) CHECK(std::abs(std::hypot(r[0], r[1], r[2]) - 1.0) < 1e-12);
  CHECK(read_json(s.path("o") / "map_v_ground.json").at("dropped_points") == 10);
}

TEST_CASE("sweeps write numbered outputs with derived seeds") {
  Scratch s;
  const auto cfg = s.config("c.json", cube_config());
  REQUIRE(execute("gamma", cfg, s.path("o"), {"geometry.side_um=5,10,20"}, 3) == 0);
  const json index = read_json(s.path("o") / "sweep.json");
  REQUIRE(index.at("points").size() == 3);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 3; ++i) {
    const auto dir = s.path("o") / ("sweep_00" + std::to_string(i));
    const json g = read_json(dir / "gamma.json");
    seeds.push_back(g.at("seed").get<std::uint64_t>());
    CHECK(seeds.back() == spinwave::derive_seed(2, i));
  }
  CHECK(read_json(s.path("o") / "sweep_002" / "gamma.json").at("geometry") == "cube:side_um=20");

  // Same sweep again, different thread count: byte-identical results.
  REQUIRE(execute("gamma", cfg, s.path("p"), {"geometry.side_um=5,10,20"}, 1) == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string d = "sweep_00" + std::to_string(i);
    CHECK(slurp(s.path("o") / d / "gamma.json") == slurp(s.path("p") / d / "gamma.json"));
  }

  CHECK(execute("gamma", cfg, s.path("q"), {"geometry.shape=1,2"}) == 2);
  CHECK(execute("gamma", cfg, s.path("q"), {"geometry.side_um=a,b"}) == 2);
  CHECK(execute("gamma", cfg, s.path("q"), {"atoms=1.5"}) == 2);
  CHECK(execute("gamma", cfg, s.path("q"), {"nothere=1"}) == 2);
  CHECK_FALSE(fs::exists(s.path("q")));
}

TEST_CASE("repeated runs give byte-identical CSV") {
  Scratch s;
  json cfg = {{"seed", 5},
              {"geometry", {{"shape", "sphere"}, {"radius_um", 1}}},
              {"atoms", 40},
              {"times", {{"t_max_times_gamma", 1}, {"samples", 5}}},
              {"mode_grid",
               {{"directions", "sphere"},
                {"n_theta", 3},
                {"n_phi", 3},
                {"detuning_points", 8},
                {"detuning_half_width_over_re_gamma_n", 5}}},
              {"pulse", {{"shape", "sin2"}, {"mean_rabi_over_gamma", 500}}}};
  const auto c = s.config("c.json", cfg);
  for (const char* cmd : {"cascade", "dynamics", "spectrum"}) {
    REQUIRE(execute(cmd, c, s.path(std::string("a_") + cmd), {}, 1) == 0);
    REQUIRE(execute(cmd, c, s.path(std::string("b_") + cmd), {}, 4) == 0);
  }
  for (const char* f : {"a_cascade/e02.csv", "a_cascade/ephi0.csv", "a_cascade/gphiphi.csv",
                        "a_cascade/modes.csv", "a_dynamics/e0.csv", "a_spectrum/spectrum.csv"}) {
    std::string other = f;
    other[0] = 'b';
    CHECK_MESSAGE(slurp(s.path(f)) == slurp(s.path(other)), f);
  }
  const auto gpp = read_csv(s.path("a_cascade/gphiphi.csv"));
  CHECK(gpp.size() == 72u * 72u);
}

TEST_CASE("canonical hash ignores key order and formatting") {
  const json a = json::parse(R"({"seed": 1, "atoms": 3, "geometry": {"side_um": 1.5, "shape": "cube"}})");
  const json b = json::parse(R"({"geometry":{"shape":"cube","side_um":1.50},"atoms":3,"seed":1})");
  CHECK(spinwave::cli::config_hash(a) == spinwave::cli::config_hash(b));
  json c = a;
  c["seed"] = 2;
  CHECK(spinwave::cli::config_hash(a) != spinwave::cli::config_hash(c));
}
