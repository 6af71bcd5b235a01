#include "dsscn/stream_data.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dsscn;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dsscn_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("one-hot encoding places a single 1 per row") {
  Eigen::MatrixXd a = one_hot_encode({2}, 3);
  CHECK(a.rows() == 1);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(0, 1) == 1.0);
  CHECK(a(0, 2) == 0.0);

  CHECK(one_hot_encode({1}, 1)(0, 0) == 1.0);

  Eigen::MatrixXd b = one_hot_encode({3, 1}, 3);
  Eigen::MatrixXd expect(2, 3);
  expect << 0, 0, 1, 1, 0, 0;
  CHECK(b == expect);
  CHECK(class_indices(b) == std::vector<int>{2, 0});
}

TEST_CASE("one-hot rejects labels outside [1, m] and names the index") {
  CHECK_THROWS_AS(one_hot_encode({1, 4}, 3), std::out_of_range);
  CHECK_THROWS_AS(one_hot_encode({0}, 3), std::out_of_range);
  try {
    one_hot_encode({1, 1, 9}, 3);
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
}

TEST_CASE("make_chunk enforces its invariants") {
  Eigen::MatrixXd X(2, 1);
  X << 1, 2;
  CHECK_NOTHROW(make_chunk(X, one_hot_encode({1, 2}, 2), 1));
  CHECK_THROWS_AS(make_chunk(Eigen::MatrixXd(0, 1), std::nullopt, 1), std::invalid_argument);
  Eigen::MatrixXd bad = X;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(make_chunk(bad, std::nullopt, 1), std::invalid_argument);
  Eigen::MatrixXd notonehot(2, 2);
  notonehot << 1, 1, 0, 1;
  CHECK_THROWS_AS(make_chunk(X, notonehot, 1), std::invalid_argument);
}

TEST_CASE("SEA labels follow the threshold rule of the active concept") {
  const auto schedule = sea_recurring_schedule(4000, 1000);
  REQUIRE(schedule.size() == 4);
  CHECK(schedule[0].theta == 4.0);
  CHECK(schedule[1].theta == 7.0);
  CHECK(schedule[1].start == 1000);

  const auto s = generate_sea(4000, schedule, std::nullopt, 11);
  REQUIRE(s.size() == 4000);
  CHECK(s.X.cols() == 3);
  CHECK(s.classes == 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double theta = (i / 1000) % 2 == 0 ? 4.0 : 7.0;
    const auto r = static_cast<Eigen::Index>(i);
    CHECK(s.X(r, 0) >= 0.0);
    CHECK(s.X(r, 2) <= 10.0);
    CHECK(s.labels[i] == (s.X(r, 0) + s.X(r, 1) < theta ? 1 : 2));
  }
}

TEST_CASE("SEA rule on hand-picked points") {
  // (3,3) under theta 7 sums to 6 < 7; (5,4) sums to 9.
  auto label = [](double f1, double f2, double theta) { return f1 + f2 < theta ? 1 : 2; };
  CHECK(label(3, 3, 7) == 1);
  CHECK(label(5, 4, 7) == 2);
  CHECK(sea_class1_probability(10.0) == doctest::Approx(0.5));
  CHECK(sea_class1_probability(7.0) == doctest::Approx(0.245));
}

TEST_CASE("SEA generation is deterministic under a seed") {
  const auto sched = sea_recurring_schedule(2000, 500);
  const auto a = generate_sea(2000, sched, std::nullopt, 5);
  const auto b = generate_sea(2000, sched, std::nullopt, 5);
  const auto c = generate_sea(2000, sched, std::nullopt, 6);
  CHECK(a.X == b.X);
  CHECK(a.labels == b.labels);
  CHECK(a.X != c.X);
}

TEST_CASE("SEA minority fraction shapes the class balance") {
  const auto s = generate_sea(20000, {{0, 7.0}}, 0.1, 3);
  double ones = 0;
  for (int l : s.labels) ones += l == 1;
  CHECK(ones / 20000.0 == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("hyperplane labels and abrupt switch") {
  HyperplaneParams p;
  p.samples = 2000;
  p.dim = 2;
  p.w = {1, 1};
  p.w0 = 1;
  p.drift_start = 1000;
  p.drift_span = 0;
  p.w_after = {-1, 1};
  const auto s = generate_hyperplane(p, 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double score = i < 1000 ? s.X(r, 0) + s.X(r, 1) : -s.X(r, 0) + s.X(r, 1);
    CHECK(s.labels[i] == (score > 1.0 ? 1 : 2));
  }
  // w = (1,1), w0 = 1 and x = (0.7, 0.6): 1.3 > 1
  CHECK(0.7 + 0.6 > 1.0);
  CHECK(hyperplane_mixing_probability(999, 1000, 0) == 0.0);
  CHECK(hyperplane_mixing_probability(1000, 1000, 0) == 1.0);
}

TEST_CASE("hyperplane mixing probability reaches one half mid-transition") {
  CHECK(hyperplane_mixing_probability(150, 100, 100) == doctest::Approx(0.5));
  // Second concept labels every sample class 2, so among samples the first
  // concept calls class 1 the class-2 share counts second-concept draws.
  HyperplaneParams p;
  p.samples = 200000;
  p.dim = 2;
  p.w = {1, 1};
  p.w0 = 1;
  p.drift_start = 0;
  p.drift_span = 200000;
  p.w_after = {-1, -1};
  const auto s = generate_hyperplane(p, 9);
  double eligible = 0, second = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (s.X(r, 0) + s.X(r, 1) > 1.0) {
      ++eligible;
      second += s.labels[i] == 2;
    }
  }
  const double share = second / eligible;
  const double sd = std::sqrt(0.25 / eligible);
  CHECK(std::abs(share - 0.5) < 4.0 * sd);
}

TEST_CASE("CSV ingestion chunks, skips the header and sizes the label space") {
  const auto path = temp_path("chunks.csv");
  LabeledStream s;
  s.X = Eigen::MatrixXd::Random(1200, 2);
  s.classes = 3;
  for (int i = 0; i < 1200; ++i) s.labels.push_back(1 + i % 3);
  write_csv(s, path);

  CsvStream csv(path, 500);
  CHECK(csv.features() == 2);
  CHECK(csv.classes() == 3);
  std::vector<std::size_t> sizes;
  std::size_t stamp = 0;
  while (auto c = csv.next()) {
    sizes.push_back(c->size());
    CHECK(c->stamp == ++stamp);
    CHECK(c->classes() == 3);
  }
  CHECK(sizes == std::vector<std::size_t>{500, 500, 200});
  std::remove(path.c_str());
}

TEST_CASE("CSV label column may be chosen and must hold positive integers") {
  const auto path = temp_path("label_first.csv");
  {
    std::ofstream out(path);
    out << "2,0.5,0.25\n1,0.1,0.2\n4,0.3,0.4\n";
  }
  CsvStream csv(path, 10, 0);
  CHECK(csv.classes() == 4);
  auto c = csv.next();
  REQUIRE(c);
  CHECK(c->size() == 3);
  CHECK(c->X(0, 0) == 0.5);
  CHECK(class_indices(*c->Y) == std::vector<int>{1, 0, 3});

  {
    std::ofstream out(path);
    out << "0.1,0.2,1.5\n";
  }
  CHECK_THROWS(CsvStream(path, 10));
  std::remove(path.c_str());
}

TEST_CASE("written CSV is byte-identical for equal seeds") {
  const auto a = temp_path("a.csv");
  const auto b = temp_path("b.csv");
  write_csv(generate_sea(1000, sea_recurring_schedule(1000, 500), std::nullopt, 7), a);
  write_csv(generate_sea(1000, sea_recurring_schedule(1000, 500), std::nullopt, 7), b);
  CHECK(slurp(a) == slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("slice and concat") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  const auto c = make_chunk(X, one_hot_encode({1, 2, 1}, 2), 4);
  const auto head = c.slice(0, 2);
  const auto tail = c.slice(2, 3);
  CHECK(head.size() == 2);
  CHECK(tail.stamp == 4);
  const auto whole = concat_chunks(head, tail);
  CHECK(whole.X == c.X);
  CHECK(*whole.Y == *c.Y);
}

}
