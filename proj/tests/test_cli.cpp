// End-to-end checks of the installed CLI surface: exit codes, output
// formats, determinism. FERMAT_CLI_PATH is injected by CMake.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fermat/csvio.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "fermat_test_cli";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(FERMAT_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = fermat::read_text_file(out);
  r.err = fermat::read_text_file(err);
  return r;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "fermat_test_cli";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("help exits 0") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("dist --help").exit_code == 0);
}

TEST_CASE("missing required option exits 2") {
  const RunResult r = run_cli("dist --alpha 2 --x 0,0 --y 1,1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("malformed config exits 2 and names the field") {
  const RunResult r =
      run_cli("experiment mu --config {\\\"schedule\\\":[200,100]} --out /tmp/never");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("schedule") != std::string::npos);
}

TEST_CASE("dist with alpha=1 reproduces the anchored Euclidean distance") {
  const fs::path cloud = work_dir() / "two_points.csv";
  std::ofstream(cloud) << "0,0\n1,0\n";
  const RunResult r =
      run_cli("dist --cloud " + cloud.string() + " --alpha 1 --x -0.2,0 --y 1.3,0");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("distance=1\n") != std::string::npos);
}

TEST_CASE("dist writes the optimal path as a JSON index array") {
  const fs::path cloud = work_dir() / "line.csv";
  std::ofstream(cloud) << "0\n0.5\n1\n";
  const fs::path path_json = work_dir() / "path.json";
  const RunResult r = run_cli("dist --cloud " + cloud.string() +
                              " --alpha 2 --x 0 --y 1 --out " + path_json.string());
  CHECK(r.exit_code == 0);
  CHECK(fermat::read_text_file(path_json) == "[0,1,2]\n");
}

TEST_CASE("knn-dist reports unreachable pairs without failing") {
  const fs::path cloud = work_dir() / "line3.csv";
  std::ofstream(cloud) << "0\n0.5\n1\n";
  const RunResult r =
      run_cli("knn-dist --cloud " + cloud.string() + " --alpha 2 --k 1 --x 0 --y 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("unreachable=true") != std::string::npos);
}

TEST_CASE("sample is deterministic per seed") {
  const fs::path out1 = work_dir() / "s1.csv";
  const fs::path out2 = work_dir() / "s2.csv";
  const std::string scenario = "{\\\"type\\\":\\\"uniform\\\"}";
  CHECK(run_cli("sample --scenario " + scenario + " --n 300 --seed 42 --out " +
                out1.string()).exit_code == 0);
  CHECK(run_cli("sample --scenario " + scenario + " --n 300 --seed 42 --out " +
                out2.string()).exit_code == 0);
  CHECK(fermat::read_text_file(out1) == fermat::read_text_file(out2));
  CHECK(fs::exists(out1.string() + ".meta.json"));
}

TEST_CASE("all-pairs emits csv and binary matrices") {
  const fs::path cloud = work_dir() / "small.csv";
  std::ofstream(cloud) << "0,0\n0.5,0\n1,0\n0.5,0.5\n";
  const fs::path mcsv = work_dir() / "m.csv";
  const fs::path mbin = work_dir() / "m.bin";
  CHECK(run_cli("all-pairs --cloud " + cloud.string() + " --alpha 2 --k 3 --out " +
                mcsv.string()).exit_code == 0);
  CHECK(run_cli("all-pairs --cloud " + cloud.string() +
                " --alpha 2 --k 3 --format bin --out " + mbin.string()).exit_code == 0);
  const std::string text = fermat::read_text_file(mcsv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  std::ifstream bin(mbin, std::ios::binary);
  char magic[8];
  bin.read(magic, 8);
  CHECK(std::string(magic, 8) == "FERMAT01");
}

TEST_CASE("oracle build / dist round trip through a file") {
  const fs::path oracle = work_dir() / "oracle.bin";
  const std::string scenario = "{\\\"type\\\":\\\"uniform\\\"}";
  CHECK(run_cli("oracle build --scenario " + scenario +
                " --alpha 2 --spacing 0.01 --out " + oracle.string()).exit_code == 0);
  const RunResult r =
      run_cli("oracle dist --oracle " + oracle.string() + " --x 0.2,0.5 --y 0.8,0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("distance=0.6") != std::string::npos);
}

TEST_CASE("numerical failures exit 3") {
  // Intensity far below one expected particle: the distance step cannot run.
  const RunResult r = run_cli("experiment mu --alpha 2 --dim 2 --schedule 0.001 "
                              "--reps 1 --seed 1 --out " + (work_dir() / "mu_fail").string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("ball subcommand writes indices with coordinates") {
  const fs::path cloud = work_dir() / "ballcloud.csv";
  std::ofstream(cloud) << "0,0\n0.1,0\n0.9,0.9\n";
  const fs::path out = work_dir() / "ball.csv";
  const RunResult r = run_cli("ball --cloud " + cloud.string() +
                              " --alpha 2 --x 0,0 --t 0.02 --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string text = fermat::read_text_file(out);
  CHECK(text == "0,0,0\n1,0.1,0\n");  // particles 0 and 1; 0.9^2+... exceeds t
}

TEST_CASE("landmarks subcommand emits tight bounds when endpoints are landmarks") {
  const fs::path cloud = work_dir() / "lm.csv";
  std::ofstream(cloud) << "0\n0.5\n1\n";
  const fs::path out = work_dir() / "bounds.csv";
  // All three particles are landmarks, so both bounds collapse to the
  // exact distance 0.25 + 0.25 = 0.5 at alpha = 2.
  const RunResult r = run_cli("landmarks --cloud " + cloud.string() +
                              " --alpha 2 --count 3 --pairs 0:2 --seed 5 --out " +
                              out.string());
  CHECK(r.exit_code == 0);
  const std::string text = fermat::read_text_file(out);
  CHECK(text == "i,j,lower,upper\n0,2,0.5,0.5\n");
}

TEST_CASE("experiment mu emits byte-identical CSV per seed") {
  const fs::path d1 = work_dir() / "mu1";
  const fs::path d2 = work_dir() / "mu2";
  const std::string args = "experiment mu --alpha 2 --dim 2 --schedule 400,800 --reps 4 --seed 7";
  CHECK(run_cli(args + " --out " + d1.string()).exit_code == 0);
  CHECK(run_cli(args + " --out " + d2.string()).exit_code == 0);
  CHECK(fermat::read_text_file(d1 / "mu.csv") == fermat::read_text_file(d2 / "mu.csv"));
}
