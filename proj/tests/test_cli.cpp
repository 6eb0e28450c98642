#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path root;
  Sandbox() {
    root = fs::temp_directory_path() / ("hcps_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "small.txt") << "dest = 60\nhorizon = 30\n";
    std::ofstream(root / "broken.mealy") << "mealy v1 2 1 1\na\n";
  }
  ~Sandbox() { fs::remove_all(root); }
  std::string at(const std::string& name) const { return (root / name).string(); }
};

const Sandbox& box() {
  static const Sandbox s;
  return s;
}

int hcps(const std::string& args) {
  const std::string cmd = std::string(HCPS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(hcps("") == 1);
  CHECK(hcps("--help") == 0);
  CHECK(hcps("fly") == 1);
  CHECK(hcps("learn") == 1);  // --out is required
  CHECK(hcps("learn --out " + box().at("x") + " --scenario /nonexistent/scenario.txt") == 1);
  CHECK(hcps("synth --out " + box().at("y") + " --variant sometimes --hm " + box().at("broken.mealy")) == 1);
}

TEST_CASE("learn, synth, validate, refine") {
  const auto& b = box();
  REQUIRE(hcps("learn --seed 3 --out " + b.at("learn1")) == 0);
  CHECK(fs::exists(b.at("learn1/hm.mealy")));
  CHECK(fs::exists(b.at("learn1/hm.dot")));
  CHECK(fs::exists(b.at("learn1/learn_report.csv")));
  CHECK(slurp(b.at("learn1/hm.mealy")).rfind("mealy v1 9 4 ", 0) == 0);

  // same seed, same bytes
  REQUIRE(hcps("learn --seed 3 --out " + b.at("learn2")) == 0);
  CHECK(slurp(b.at("learn1/hm.mealy")) == slurp(b.at("learn2/hm.mealy")));
  CHECK(slurp(b.at("learn1/learn_report.csv")) == slurp(b.at("learn2/learn_report.csv")));

  // output directories are never reused
  CHECK(hcps("learn --seed 3 --out " + b.at("learn1")) == 1);

  const std::string hm = " --hm " + b.at("learn1/hm.mealy");
  const std::string small = " --scenario " + b.at("small.txt");
  REQUIRE(hcps("synth" + small + hm + " --out " + b.at("synth")) == 0);
  CHECK(slurp(b.at("synth/arena_stats.txt")).find("realizable yes") != std::string::npos);
  CHECK(slurp(b.at("synth/strategy.txt")).rfind("strategy v1\n", 0) == 0);

  CHECK(hcps("synth --hm " + b.at("broken.mealy") + " --out " + b.at("synth_bad")) == 1);
  CHECK(hcps("synth --variant no-override" + hm + " --out " + b.at("synth_no")) == 2);

  const std::string strat = " --strategy " + b.at("synth/strategy.txt");
  CHECK(hcps("validate --runs 4" + small + hm + strat + " --out " + b.at("val")) == 0);
  CHECK(fs::exists(b.at("val/traces/run_00.csv")));
  CHECK(fs::exists(b.at("val/traces/run_03.csv")));
  CHECK(slurp(b.at("val/verdicts.csv")).find("safe-and-reached") != std::string::npos);

  // strategy synthesized for another scenario
  CHECK(hcps("validate --runs 1" + hm + strat + " --out " + b.at("val_other")) == 1);
  // the no-supervision baseline collides under the default braking profile
  CHECK(hcps("validate --runs 3 --policy nominal" + hm + " --out " + b.at("val_nominal")) == 3);
  CHECK(hcps("validate --runs 0" + small + hm + strat + " --out " + b.at("val_zero")) == 0);

  REQUIRE(hcps("refine --runs 3 --max-states 3" + small + " --out " + b.at("ref")) == 0);
  const auto report = slurp(b.at("ref/report.txt"));
  CHECK(report.rfind("refinement report v1\n", 0) == 0);
  CHECK(report.find("termination all-pass") != std::string::npos);
  CHECK(fs::exists(b.at("ref/iter_01/hm.mealy")));
  CHECK(fs::exists(b.at("ref/iter_01/strategy.txt")));
}
