#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("chiarella_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path log = scratch() / "log.txt";
  const std::string cmd = std::string(CHIARELLA_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json linear_config() {
  return {{"kappa", 0.1}, {"beta", 0.2}, {"gamma", 1e-3}, {"alpha", 0.2}, {"sigma_n", 0.2}, {"sigma_v", 0.1},
          {"total_time", 2000.0}, {"dt", 5e-3}, {"seed", 3}, {"subsample_stride", 200}};
}

}  // namespace

TEST_CASE("simulate writes histograms and moments") {
  const auto cfg = write_config("sim.json", linear_config());
  const fs::path out = scratch() / "sim";
  fs::create_directories(out);
  const auto r = run("simulate --config " + cfg.string() + " --out " + out.string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(out / "delta_hist.csv"));
  CHECK(fs::exists(out / "m_hist.csv"));
  const json stats = json::parse(slurp(out / "stats.json"));
  CHECK(stats["meta"]["seed"] == 3);
  CHECK(stats["n_retained"].get<int>() > 0);

  SUBCASE("rerun is byte-identical") {
    const fs::path again = scratch() / "sim2";
    fs::create_directories(again);
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + again.string() + " --threads 2").code == 0);
    CHECK(slurp(out / "delta_hist.csv") == slurp(again / "delta_hist.csv"));
    CHECK(slurp(out / "m_hist.csv") == slurp(again / "m_hist.csv"));
  }
}

TEST_CASE("configuration errors exit with status 2") {
  auto j = linear_config();
  j.erase("sigma_n");
  const auto r = run("simulate --config " + write_config("missing.json", j).string() + " --out " + scratch().string());
  CHECK(r.code == 2);
  CHECK(r.output.find("sigma_n") != std::string::npos);
  CHECK(run("reproduce-fig 5 --out " + scratch().string()).code == 2);
  CHECK(run("no-such-command").code == 2);
}

TEST_CASE("density command") {
  SUBCASE("slow-trend curve") {
    json j = {{"kappa", 0.075}, {"beta", 0.05}, {"gamma", 5e4}, {"alpha", 2e-5}, {"sigma_n", 0.2},
              {"sigma_v", 0.1}, {"regime", "slow-trend"}, {"grid", {{"lo", -4}, {"hi", 4}, {"n", 101}}}};
    const auto r = run("density --config " + write_config("slow.json", j).string() + " --out " + scratch().string());
    REQUIRE_MESSAGE(r.code == 0, r.output);
    const json meta = json::parse(slurp(scratch() / "density.json"));
    CHECK(meta["equation"] == "gaussian-cosh");
  }
  SUBCASE("linear regime outside its validity warns") {
    json j = linear_config();
    j["gamma"] = 2.0;
    j["regime"] = "linear";
    const auto r = run("density --config " + write_config("lin.json", j).string() + " --out " + scratch().string());
    CHECK(r.code == 0);
    CHECK(r.output.find("warning") != std::string::npos);
  }
  SUBCASE("strong coupling past the critical theta is refused with status 4") {
    json j = {{"kappa", 0.05}, {"beta", 1.2 * 0.7 * std::sqrt(50.0)}, {"gamma", 1.0}, {"alpha", 50.0},
              {"sigma_n", 0.7}, {"sigma_v", 0.2}, {"regime", "strong-coupling"}};
    const auto r = run("density --config " + write_config("sc.json", j).string() + " --out " + scratch().string());
    CHECK(r.code == 4);
    CHECK(r.output.find("NoGaussianDensity") != std::string::npos);
  }
}

TEST_CASE("sweep marks both thresholds") {
  json j = {{"kappa", 0.2}, {"beta", 0.05}, {"gamma", 5e4}, {"alpha", 2e-5}, {"sigma_n", 0.2}, {"sigma_v", 0.1},
            {"regime", "slow-trend"},
            {"sweep", {{"param1", "kappa"}, {"values1", {0.04, 0.06, 0.09, 0.11}}}}};
  const auto r = run("sweep --config " + write_config("sweep.json", j).string() + " --out " + scratch().string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto csv = slurp(scratch() / "sweep.csv");
  CHECK(csv.find("0.04,,limit-cycle,bimodal,") != std::string::npos);
  CHECK(csv.find("0.06,,stable-spiral,bimodal,") != std::string::npos);
  CHECK(csv.find("0.09,,stable-spiral,bimodal,") != std::string::npos);
  CHECK(csv.find("0.11,,stable-spiral,unimodal,") != std::string::npos);
}

TEST_CASE("verify command") {
  const auto ok = run("verify --out " + scratch().string());
  CHECK_MESSAGE(ok.code == 0, ok.output);
  const json report = json::parse(slurp(scratch() / "verify.json"));
  CHECK(report["n_checks"].get<int>() >= 5);
  const auto bad = run("verify --inject-error --out " + scratch().string());
  CHECK(bad.code == 1);
  CHECK(bad.output.find("FAIL fpe-residuals") != std::string::npos);
}
