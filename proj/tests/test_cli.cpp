#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = DSSCN_CLI_PATH;

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dsscn_cli_" + name)).string();
}

int run(const std::string& args, const std::string& log = "/dev/null") {
  const int status = std::system((kCli + " " + args + " >" + log + " 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate writes the requested rows and is seed-stable") {
  const auto a = tmp("sea_a.csv");
  const auto b = tmp("sea_b.csv");
  CHECK(run("generate sea --samples 100000 --drift-every 50000 --out " + a + " --seed 7") == 0);
  CHECK(lines(a) == 100001);
  CHECK(run("generate sea --samples 100000 --drift-every 50000 --out " + b + " --seed 7") == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run("generate hyperplane --samples 500 --drift-start 100 --drift-span 200 --out " + b + " --seed 2") == 0);
  CHECK(lines(b) == 501);
  // transition starting past the end of the stream
  CHECK(run("generate hyperplane --samples 500 --out " + b) == 1);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("generate sea --samples 10") == 2);
  CHECK(run("run --no-such-flag") == 2);
  CHECK(run("") == 2);
  CHECK(run("oracle no-such-check") == 2);
  const auto cfg = tmp("bad.cfg");
  std::ofstream(cfg) << "stack.alpha = lots\n";
  CHECK(run("run --config " + cfg) == 2);
  std::ofstream(cfg) << "no.such.key = 1\n";
  CHECK(run("run --config " + cfg) == 2);
  std::filesystem::remove(cfg);
}

TEST_CASE("runtime failures exit with 1") {
  CHECK(run("run --data " + tmp("missing.csv")) == 1);
  CHECK(run("inspect --model " + kCli) == 1);
}

TEST_CASE("holdout run honours the split and writes trace and summaries") {
  const auto trace = tmp("trace.csv");
  const auto summary = tmp("summary.txt");
  const auto json = tmp("summary.json");
  const auto model = tmp("model.bin");
  const auto log = tmp("run.log");
  const auto events = tmp("events.csv");
  REQUIRE(run("run --dataset sea --protocol holdout --chunk 1000 --train-fraction 0.8 --set source.samples=6000 "
              "--events-out " + events + " --trace-out " + trace + " --summary-out " + summary + " --summary-json " + json + " --model-out " +
                  model,
              log) == 0);
  std::ifstream in(trace);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",800,200,") != std::string::npos);
  }
  CHECK(rows == 6);
  const auto text = slurp(summary);
  CHECK(text.find("run.protocol = holdout") != std::string::npos);
  CHECK(text.find("accuracy_mean = ") != std::string::npos);
  CHECK(text.find("accuracy_std = ") != std::string::npos);
  CHECK(slurp(json).find("\"accuracy\"") != std::string::npos);
  CHECK(slurp(events).rfind("stamp,layer,nodes_before,scope,zeta_total,satisfied\n", 0) == 0);
  CHECK(lines(events) >= 2);
  CHECK(slurp(log).find("stack.delta_merge = ") != std::string::npos);
  CHECK(run("inspect --model " + model, log) == 0);
  CHECK(slurp(log).find("depth = ") != std::string::npos);
  for (const auto& p : {trace, summary, json, model, log, events}) std::filesystem::remove(p);
}

TEST_CASE("config file overrides defaults and flags override the file") {
  const auto cfg = tmp("over.cfg");
  const auto summary = tmp("over.txt");
  std::ofstream(cfg) << "stack.alpha = 0.25\nstack.delta_merge = 0.002\nescn.q = 0.4\nscn.scopes = 0.5,2\n"
                        "scn.t_max = 5\nscn.r = 0.95\ndrift.tau_chunks = 40\nescn.theta_prune = 2.5\n"
                        "escn.p_b = 0.1\nescn.omega = 1000\nescn.rho_decay = 0.001\nescn.delta_c = 0.1\n"
                        "run.seed = 4\nsource.samples = 2000\n";
  REQUIRE(run("run --config " + cfg + " --seed 9 --summary-out " + summary) == 0);
  const auto text = slurp(summary);
  for (const char* expect : {"stack.alpha = 0.25", "stack.delta_merge = 0.002", "escn.q = 0.4", "scn.scopes = 0.5,2",
                             "scn.t_max = 5", "scn.r = 0.95", "drift.tau_chunks = 40", "escn.theta_prune = 2.5",
                             "escn.p_b = 0.1", "escn.omega = 1000", "escn.rho_decay = 0.001", "escn.delta_c = 0.1",
                             "run.seed = 9"}) {
    CHECK_MESSAGE(text.find(expect) != std::string::npos, expect);
  }
  std::filesystem::remove(cfg);
  std::filesystem::remove(summary);
}

TEST_CASE("multi-seed sweep writes one trace per seed") {
  const auto trace = tmp("sweep.csv");
  REQUIRE(run("run --set source.samples=2000 --seeds 2 --jobs 2 --trace-out " + trace) == 0);
  CHECK(std::filesystem::exists(tmp("sweep.seed1.csv")));
  CHECK(std::filesystem::exists(tmp("sweep.seed2.csv")));
  std::filesystem::remove(tmp("sweep.seed1.csv"));
  std::filesystem::remove(tmp("sweep.seed2.csv"));
}

TEST_CASE("oracle checks pass") {
  CHECK(run("oracle mici --n 1000 --seed 3") == 0);
  CHECK(run("oracle density --samples 10000") == 0);
  CHECK(run("oracle fwgrls") == 0);
  CHECK(run("oracle hoeffding") == 0);
  CHECK(run("oracle chebyshev") == 0);
}

}
