#include "dsscn/config.hpp"
#include "dsscn/snapshot.hpp"

#include <doctest.h>

#include <sstream>

using namespace dsscn;

TEST_SUITE("config") {

TEST_CASE("settings text with comments and blanks") {
  std::istringstream in("# header\n\nstack.alpha = 0.25  # inline\nscn.scopes = 1, 2,3\n");
  const auto s = parse_settings(in, "test");
  CHECK(s.at("stack.alpha") == "0.25");
  RunConfig cfg;
  apply_settings(cfg, s);
  CHECK(cfg.stack.alpha == 0.25);
  CHECK(cfg.stack.escn.scn.scopes == std::vector<double>{1, 2, 3});
}

TEST_CASE("syntax errors name the line") {
  std::istringstream in("stack.alpha = 1\nnot a setting\n");
  try {
    parse_settings(in, "cfg.txt");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.txt:2") != std::string::npos);
  }
}

TEST_CASE("unknown keys and bad values are config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "stack.alpah", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "escn.q", "half"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "run.protocol", "sometimes"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "stack.feature_weighting", "maybe"), ConfigError);
}

TEST_CASE("every tunable is reachable from settings") {
  RunConfig cfg;
  apply_setting(cfg, "stack.alpha", "0.3");
  apply_setting(cfg, "stack.delta_merge", "0.01");
  apply_setting(cfg, "escn.q", "0.4");
  apply_setting(cfg, "scn.scopes", "0.5,1,2");
  apply_setting(cfg, "scn.t_max", "7");
  apply_setting(cfg, "scn.r", "0.95");
  apply_setting(cfg, "drift.tau_chunks", "50");
  apply_setting(cfg, "escn.theta_prune", "3");
  apply_setting(cfg, "escn.p_b", "0.2");
  apply_setting(cfg, "escn.omega", "1000");
  apply_setting(cfg, "escn.rho_decay", "0");
  apply_setting(cfg, "escn.delta_c", "0.1");
  CHECK(cfg.stack.alpha == 0.3);
  CHECK(cfg.stack.delta_merge == 0.01);
  CHECK(cfg.stack.escn.q == 0.4);
  CHECK(cfg.stack.escn.scn.scopes.size() == 3);
  CHECK(cfg.stack.escn.scn.t_max == 7);
  CHECK(cfg.stack.escn.scn.r == 0.95);
  CHECK(cfg.stack.tau_chunks == 50);
  CHECK(cfg.stack.escn.theta_prune == 3);
  CHECK(cfg.stack.escn.p_b == 0.2);
  CHECK(cfg.stack.escn.omega == 1000);
  CHECK(cfg.stack.escn.rho_decay == 0);
  CHECK(cfg.stack.escn.delta_c == 0.1);
}

TEST_CASE("described configuration reproduces itself") {
  RunConfig cfg;
  cfg.stack.alpha = 0.1 + 0.2;
  cfg.hp_w = {0.3, 1e-7};
  cfg.protocol = Protocol::Holdout;
  cfg.data_path = "some/file.csv";
  RunConfig back;
  for (const auto& [k, v] : describe(cfg)) apply_setting(back, k, v);
  CHECK(describe(back) == describe(cfg));
  CHECK(back.stack.alpha == cfg.stack.alpha);
  CHECK(format_double(0.1) == "0.1");
}

}

TEST_SUITE("snapshot") {

namespace {

StackedNetwork trained(std::size_t chunks, std::uint64_t seed) {
  StackedNetwork net(3, 2, StackConfig{}, seed);
  StreamChunker src(generate_sea(chunks * 500, sea_recurring_schedule(chunks * 500, 250 * chunks), std::nullopt, seed),
                    500);
  while (auto c = src.next()) net.process_chunk(*c);
  return net;
}

}  // namespace

TEST_CASE("layer bytes round trip") {
  const auto net = trained(6, 1);
  const auto& layer = net.links()[0].layer;
  const auto bytes = serialize_layer(layer);
  const auto back = deserialize_layer(bytes);
  CHECK(serialize_layer(back) == bytes);
  CHECK(back.size() == layer.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(20, 3).cwiseAbs();
  CHECK(back.infer_batch(X) == layer.infer_batch(X));
  CHECK_THROWS(deserialize_layer(bytes.substr(0, bytes.size() / 2)));
  CHECK_THROWS(deserialize_layer("garbage"));
}

TEST_CASE("a restored stack continues exactly like the original") {
  auto original = trained(60, 2);
  std::stringstream ss;
  write_stack(ss, original);
  auto restored = read_stack(ss);
  CHECK(restored.depth() == original.depth());

  StreamChunker more(generate_sea(5000, {{0, 7.0}}, std::nullopt, 33), 500);
  while (auto c = more.next()) {
    c->stamp += 60;
    const auto a = original.process_chunk(*c);
    const auto b = restored.process_chunk(*c);
    CHECK(a.verdict.status == b.verdict.status);
    CHECK(a.depth == b.depth);
  }
  std::stringstream sa, sb;
  write_stack(sa, original);
  write_stack(sb, restored);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("wrong magic or version is rejected") {
  std::stringstream ss("NOTASTACKATALL");
  CHECK_THROWS_AS(read_stack(ss), std::runtime_error);
}

}
