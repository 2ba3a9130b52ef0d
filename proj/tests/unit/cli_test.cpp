#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using gcabulf::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gcabulf_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_panel(const fs::path& dir) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.4);
  std::vector<std::vector<double>> loads(3, std::vector<double>(24 * 8));
  for (std::size_t t = 0; t < loads[0].size(); ++t) {
    const std::size_t h = t % 24;
    loads[0][t] = h >= 7 && h < 9 ? 1.5 : 0.0;
    loads[1][t] = h >= 18 && h < 21 && coin(rng) ? 0.9 : 0.0;
    loads[2][t] = coin(rng) ? 0.02 : 0.0;
  }
  const auto path = dir / "panel.csv";
  std::ofstream out(path);
  gcabulf::write_csv_panel(fixtures::make_panel(loads), out);
  return path;
}

std::vector<std::string> small_flags() {
  return {"--set", "hidden_dim=4", "--set", "fc_hidden=4", "--set", "co_hidden=4", "--set", "buffer_len=32",
          "--set", "epochs_stage1=1", "--set", "epochs_stage2=1", "--tau", "4"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({"filter", "--bogus"}).code == gcabulf::cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == gcabulf::cli::kExitUsage);
  CHECK(invoke({}).code == gcabulf::cli::kExitUsage);
  CHECK(invoke({"synth"}).code == gcabulf::cli::kExitUsage);
  CHECK(invoke({"--version"}).code == gcabulf::cli::kExitOk);
}

TEST_CASE("data errors exit 2") {
  const auto dir = scratch("data");
  CHECK(invoke({"filter", "--csv", (dir / "none.csv").string(), "--out", dir.string()}).code ==
        gcabulf::cli::kExitData);
  std::ofstream(dir / "bad.csv") << "timestamp,total,a\n2013-01-07T00:00:00Z,x,1\n";
  CHECK(invoke({"filter", "--csv", (dir / "bad.csv").string(), "--out", dir.string()}).code ==
        gcabulf::cli::kExitData);
  fs::remove_all(dir);
}

TEST_CASE("filter with a config file") {
  const auto dir = scratch("filter");
  const auto panel = write_panel(dir);
  std::ofstream(dir / "c.json") << R"({"data": {"csv": ")" << panel.string() << R"("}, "output_dir": ")"
                                << dir.string() << R"(", "train": {"alpha": 0.4}})";
  const auto r = invoke({"filter", "--config", (dir / "c.json").string(), "--fixed-timestamp", "2020-01-01T00:00:00Z"});
  CHECK(r.code == gcabulf::cli::kExitOk);
  const auto csv = slurp(dir / "contribution.csv");
  CHECK(csv.find("appliance,vola,period,ctrb,selected,residual_std_after") != std::string::npos);
  CHECK(csv.find("# created=2020-01-01T00:00:00Z") != std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"train": {"alpah": 0.4}})";
  CHECK(invoke({"filter", "--config", (dir / "bad.json").string()}).code == gcabulf::cli::kExitUsage);
  CHECK(invoke({"filter", "--csv", panel.string(), "--set", "alpha=2", "--out", dir.string()}).code ==
        gcabulf::cli::kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("synth, group, train, predict") {
  const auto dir = scratch("flow");
  CHECK(invoke({"synth", "--preset", "two-linked-groups", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "ground_truth.json"));
  const auto panel = (dir / "panel.csv").string();
  CHECK(invoke({"group", "--csv", panel, "--epsilon", "0.3", "--no-filter", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "groups.json").find("\"groups\"") != std::string::npos);
  CHECK(invoke(concat({"train", "--csv", panel, "--out", dir.string(), "--paper-relu-gates"}, small_flags())).code ==
        0);
  CHECK(slurp(dir / "model.ckpt").find("config.gates=relu") != std::string::npos);
  CHECK(invoke({"predict", "--csv", panel, "--checkpoint", (dir / "model.ckpt").string(), "--out", dir.string()})
            .code == 0);
  CHECK(fs::exists(dir / "predictions.csv"));
  fs::remove_all(dir);
}

TEST_CASE("ablate keeps going past a failing cell") {
  const auto dir = scratch("ablate");
  const auto panel = write_panel(dir).string();
  const auto r = invoke(concat({"ablate", "--csv", panel, "--out", dir.string(), "--taus", "4,500", "--epsilons",
                                "0.5", "--sigma-rel", "0.05"},
                               {"--set", "hidden_dim=4", "--set", "fc_hidden=4", "--set", "co_hidden=4", "--set",
                                "buffer_len=16", "--set", "epochs_stage1=1", "--set", "epochs_stage2=1"}));
  CHECK(r.code == gcabulf::cli::kExitOk);
  const auto csv = slurp(dir / "ablation.csv");
  CHECK(csv.find(",ok") != std::string::npos);
  CHECK(csv.find("failed:") != std::string::npos);
  fs::remove_all(dir);
}
