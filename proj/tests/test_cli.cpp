#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin_path() {
  const char* bin = std::getenv("EPSIM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "EPSIM_BIN must point at the epsim binary");
  return bin;
}

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("epsim_cli_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run(const std::string& args) {
  const std::string cmd = bin_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::string kDimerSpectrum = R"({
  "lattice": {"modes": 2, "kappa": 1.0, "loss": [1.0, 0.0]},
  "gamma": {"min": 0.0, "max": 4.0, "steps": 81}
})";

const std::string kCriticalEvolve = R"({
  "lattice": {"modes": 2, "kappa": 1.0, "loss": [1.0, 0.0]},
  "gamma": 2.0,
  "alpha": 4.47213595499958,
  "input": {"type": "exceptional-mode", "gamma_c": 2.0},
  "z": {"min": 0.0, "max": 1.0, "steps": 5},
  "photon_numbers": [6]
})";

const std::string kPostselect = R"({
  "lattice": {"modes": 2, "kappa": 1.0, "loss": [1.0, 0.0]},
  "gamma": 2.0,
  "alpha": 4.47213595499958,
  "input": {"type": "exceptional-mode", "gamma_c": 2.0},
  "z": {"min": 0.0, "max": 2.5, "steps": 6},
  "photon_numbers": [6]
})";

const std::string kSense = R"({
  "lattice": {"modes": 2, "kappa": 1.0, "loss": [1.0, 0.0]},
  "gamma": {"min": 1.8, "max": 2.2, "steps": 5},
  "z": 1.5,
  "photon_numbers": [2, 6],
  "options": {"working_point": 2.0}
})";

const std::string kFockGraph = R"({
  "lattice": {"modes": 3, "kappa": 1.0, "loss": [0.0, 1.0, 0.0]},
  "photon_numbers": [2]
})";

const std::string kPrepCheck = R"({
  "lattice": {"modes": 3, "kappa": 1.0, "loss": [0.0, 1.0, 0.0]}
})";

}  // namespace

TEST_CASE("spectrum: table shape and EP sidecar") {
  fs::path dir = fresh_dir("spectrum");
  write_file(dir / "cfg.json", kDimerSpectrum);
  CHECK(run("spectrum --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);

  auto rows = read_csv(dir / "out" / "spectrum.csv");
  REQUIRE(rows.size() == 82);  // header + 81 grid points
  CHECK(rows[0] ==
        std::vector<std::string>{"gamma", "branch_1_re", "branch_1_im",
                                 "branch_2_re", "branch_2_im"});
  CHECK(rows[1][0] == "0");
  CHECK(rows.back()[0] == "4");

  json meta = json::parse(read_file(dir / "out" / "spectrum.meta.json"));
  REQUIRE(meta["exceptional_points"].size() == 1);
  const auto& ep = meta["exceptional_points"][0];
  CHECK(std::abs(ep["gamma_c"].get<double>() - 2.0) <= 1e-6);
  CHECK(ep["order_estimate"] == 2);
  CHECK(ep["classified"] == true);
  CHECK(meta["command"] == "spectrum");
  CHECK(meta["tool"]["name"] == "epsim");
}

TEST_CASE("spectrum: degenerate range emits one row and no EP analysis") {
  fs::path dir = fresh_dir("spectrum1");
  write_file(dir / "cfg.json", kDimerSpectrum);
  CHECK(run("spectrum --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string() +
            " --override gamma={\\\"min\\\":0,\\\"max\\\":0,\\\"steps\\\":1}") == 0);
  auto rows = read_csv(dir / "out" / "spectrum.csv");
  REQUIRE(rows.size() == 2);
  json meta = json::parse(read_file(dir / "out" / "spectrum.meta.json"));
  CHECK(meta["exceptional_points"].empty());
  // the override is echoed and applied
  CHECK(meta["overrides"].size() == 1);
  CHECK(meta["config"]["gamma"]["steps"] == 1);
}

TEST_CASE("evolve: transparency fraction at z = 1") {
  fs::path dir = fresh_dir("evolve");
  write_file(dir / "cfg.json", kCriticalEvolve);
  CHECK(run("evolve --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);
  auto rows = read_csv(dir / "out" / "evolve.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"z", "intensity_1", "intensity_2",
                                            "total", "mean_photons", "poisson_6"});
  // last row is z = 1: total fraction e^-2, mean photons 20 e^-2
  const auto& last = rows.back();
  CHECK(std::abs(std::stod(last[3]) - std::exp(-2.0)) <= 1e-9);
  CHECK(std::abs(std::stod(last[4]) - 20.0 * std::exp(-2.0)) <= 1e-8);
  // z = 0: unit transmission, mean photons = |alpha|^2
  CHECK(std::stod(rows[1][3]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::stod(rows[1][4]) == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("postselect: probabilities sum to one and stay constant at criticality") {
  fs::path dir = fresh_dir("postselect");
  write_file(dir / "cfg.json", kPostselect);
  CHECK(run("postselect --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);
  auto rows = read_csv(dir / "out" / "postselect.csv");
  REQUIRE(rows.size() == 7);
  REQUIRE(rows[0].size() == 9);  // z + 7 states + status
  CHECK(rows[0][1] == "p_6_0");
  CHECK(rows[0][7] == "p_0_6");
  CHECK(rows[0][8] == "status");
  for (size_t r = 1; r < rows.size(); ++r) {
    CHECK(rows[r].back() == "ok");
    double sum = 0.0;
    for (int c = 1; c <= 7; ++c) sum += std::stod(rows[r][c]);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    // critical-point constancy, row against row
    for (int c = 1; c <= 7; ++c) CHECK(rows[r][c] == rows[1][c]);
  }
  CHECK(std::stod(rows[1][4]) == doctest::Approx(20.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("postselect: one file per requested photon number") {
  fs::path dir = fresh_dir("postselect_multi");
  write_file(dir / "cfg.json", kPostselect);
  CHECK(run("postselect --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string() + " --override photon_numbers=[1,6]") == 0);
  CHECK(fs::exists(dir / "out" / "postselect_N1.csv"));
  CHECK(fs::exists(dir / "out" / "postselect_N6.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "postselect.csv"));
  json meta = json::parse(read_file(dir / "out" / "postselect.meta.json"));
  CHECK(meta["tables"].size() == 2);
  CHECK(meta["outputs"].size() == 2);
}

TEST_CASE("sense: grid echo and slope sidecar") {
  fs::path dir = fresh_dir("sense");
  write_file(dir / "cfg.json", kSense);
  CHECK(run("sense --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);
  auto rows = read_csv(dir / "out" / "sense.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"gamma", "n_bar",
                                            "mean_photons_neutral_N2",
                                            "mean_photons_neutral_N6"});
  CHECK(rows[1][0] == "1.8");
  CHECK(rows[3][0] == "2");
  CHECK(rows.back()[0] == "2.2");

  json meta = json::parse(read_file(dir / "out" / "sense.meta.json"));
  const auto& slopes = meta["slopes"];
  CHECK(slopes["classical"]["slope"].get<double>() > 0.0);
  REQUIRE(slopes["post_selected"].size() == 2);
  const double p2 = slopes["post_selected"][0]["slope_per_photon"].get<double>();
  const double p6 = slopes["post_selected"][1]["slope_per_photon"].get<double>();
  CHECK(std::abs(p6 / p2 - 1.0) <= 1e-6);
  CHECK(slopes["post_selected"][0]["one_sided"] == true);
}

TEST_CASE("fock-graph: node listing, dot file, and counts") {
  fs::path dir = fresh_dir("fock_graph");
  write_file(dir / "cfg.json", kFockGraph);
  CHECK(run("fock-graph --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);
  auto rows = read_csv(dir / "out" / "fock-graph.csv");
  REQUIRE(rows.size() == 7);  // header + 6 nodes
  CHECK(rows[0] == std::vector<std::string>{"node", "label", "loss"});
  json meta = json::parse(read_file(dir / "out" / "fock-graph.meta.json"));
  CHECK(meta["graph"]["nodes"] == 6);
  CHECK(meta["graph"]["edges"] == 6);
  const std::string dot = read_file(dir / "out" / "fock-graph.dot");
  CHECK(dot.find("graph fock {") == 0);
  CHECK(dot.find("\"2_0_0\"") != std::string::npos);
}

TEST_CASE("prep-check: recipe lands on the exceptional mode") {
  fs::path dir = fresh_dir("prep");
  write_file(dir / "cfg.json", kPrepCheck);
  CHECK(run("prep-check --config " + (dir / "cfg.json").string() + " --out " +
            (dir / "out").string()) == 0);
  json meta = json::parse(read_file(dir / "out" / "prep-check.meta.json"));
  CHECK(meta["preparation"]["residual"].get<double>() <= 1e-8);
  CHECK(meta["preparation"]["z_star"].get<double>() ==
        doctest::Approx(3.0 * M_PI / (4.0 * std::sqrt(2.0))).epsilon(1e-9));
}

TEST_CASE("exit codes: validation, capacity, numeric failure, usage") {
  fs::path dir = fresh_dir("codes");
  write_file(dir / "cfg.json", kDimerSpectrum);
  write_file(dir / "bad.json", "{\"lattice\": {");
  write_file(dir / "fock.json", kFockGraph);
  write_file(dir / "sense.json", kSense);
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run("spectrum --config " + (dir / "missing.json").string() + out) == 2);
  CHECK(run("spectrum --config " + (dir / "bad.json").string() + out) == 2);
  CHECK(run("spectrum --config " + (dir / "cfg.json").string() + out +
            " --override lattice.modes=1") == 2);
  CHECK(run("spectrum --config " + (dir / "cfg.json").string() + out +
            " --override gamma=-1") == 2);
  CHECK(run("bogus --config " + (dir / "cfg.json").string() + out) == 2);
  CHECK(run("spectrum" + out) == 2);
  CHECK(run("--help") == 0);
  CHECK(run("fock-graph --config " + (dir / "fock.json").string() + out +
            " --override photon_numbers=[2000]") == 4);
  // huge z drives every sector weight below the representable floor
  CHECK(run("sense --config " + (dir / "sense.json").string() + out +
            " --override z=900") == 3);
}

TEST_CASE("repeated runs are byte-identical and the config echo is lossless") {
  fs::path dir = fresh_dir("determinism");
  write_file(dir / "cfg.json", kPostselect);
  const std::string cfg = (dir / "cfg.json").string();
  CHECK(run("postselect --config " + cfg + " --out " + (dir / "a").string()) == 0);
  CHECK(run("postselect --config " + cfg + " --out " + (dir / "b").string()) == 0);
  for (const char* name : {"postselect.csv", "postselect.meta.json"})
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));

  // re-running from the echoed config reproduces the table
  json meta = json::parse(read_file(dir / "a" / "postselect.meta.json"));
  write_file(dir / "echo.json", meta["config"].dump());
  CHECK(run("postselect --config " + (dir / "echo.json").string() + " --out " +
            (dir / "c").string()) == 0);
  CHECK(read_file(dir / "a" / "postselect.csv") ==
        read_file(dir / "c" / "postselect.csv"));
}
