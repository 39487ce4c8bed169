#include <catch2/catch_amalgamated.hpp>

#include "svmm/csv.hpp"
#include "svmm/error.hpp"
#include "svmm/stats.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

using namespace svmm;

TEST_CASE("summary uses the n - 1 denominator") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto s = stats::summarize(x);
  CHECK(s.n == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.std == Catch::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.se == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  const std::vector<double> one{7.0};
  CHECK(stats::summarize(one).std == 0.0);
  CHECK(stats::summarize(std::vector<double>{}).n == 0);
}

TEST_CASE("spearman rank correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{10, 20, 25, 100, 1000};
  const std::vector<double> down{5, 4, 3, 2, 1};
  CHECK(stats::spearman(x, up) == Catch::Approx(1.0));
  CHECK(stats::spearman(x, down) == Catch::Approx(-1.0));
  const std::vector<double> ties{1, 1, 2, 2, 3};
  // Average ranks: 1.5 1.5 3.5 3.5 5 against 1..5.
  CHECK(stats::spearman(x, ties) == Catch::Approx(0.9486832980505138));
  CHECK_THROWS_AS(stats::spearman(x, std::vector<double>{1, 2}), ConfigError);
}

TEST_CASE("histogram counts every value") {
  const std::vector<double> x{0.0, 0.1, 0.5, 0.99, 1.0};
  const auto h = stats::histogram(x, 2);
  REQUIRE(h.edges.size() == 3);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 3);
  CHECK_THROWS_AS(stats::histogram(x, 0), ConfigError);
}

TEST_CASE("csv formatting and quoting") {
  CHECK(csv::format(0.1) == "0.1");
  CHECK(csv::format(68.7404) == "68.7404");
  CHECK(csv::format(-2.0) == "-2");
  CHECK(csv::format(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::stod(csv::format(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv::quote("plain") == "plain");
  CHECK(csv::quote("a,b") == "\"a,b\"");
  CHECK(csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("csv writer enforces the header width") {
  const auto path = std::filesystem::temp_directory_path() / "svmm_csv_writer_test.csv";
  {
    csv::Writer w(path, {"a", "b c", "d,e"});
    w.cell(1).cell(2.5).cell("x");
    w.end_row();
    w.cell(1);
    CHECK_THROWS(w.end_row());
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().rfind("a,b c,\"d,e\"\r\n1,2.5,x\r\n", 0) == 0);
  std::filesystem::remove(path);
}
