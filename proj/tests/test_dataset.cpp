#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "memxbar/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <set>

using namespace memxbar;

namespace {

int hamming(const Pattern& a, const Pattern& b) {
  int d = 0;
  for (int k = 0; k < 9; ++k) d += a.pixels[k] != b.pixels[k];
  return d;
}

// Classic perceptron on a homogeneous problem; returns true once it finds a
// separating vector (it cannot prove the converse).
bool perceptron_finds_separator(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int max_sweeps) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool clean = true;
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      if (y(n) * x.row(n).dot(w) <= 0) {
        w += y(n) * x.row(n).transpose();
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("default set layout") {
  const auto set = build_default_set();
  REQUIRE(set.patterns.size() == 30);
  REQUIRE(set.base_images.size() == 3);
  for (int k = 0; k < 10; ++k) {
    CHECK(set.patterns[k].label == 0);
    CHECK(set.patterns[10 + k].label == 1);
    CHECK(set.patterns[20 + k].label == 2);
  }
  const Pattern& flip0 = set.patterns[1];
  CHECK(flip0.name == "z-flip0");
  CHECK(flip0.pixels == std::array<std::uint8_t, 9>{0, 1, 1, 0, 1, 0, 1, 1, 1});
  CHECK(set.patterns[5].name == "z-flip4");
}

TEST_CASE("bases are distinct and flips are one pixel away") {
  const auto set = build_default_set();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) CHECK(hamming(set.base_images[a], set.base_images[b]) > 0);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 1; k < 10; ++k) CHECK(hamming(set.patterns[c * 10], set.patterns[c * 10 + k]) == 1);
  }
}

TEST_CASE("encode") {
  const PerceptronConfig<> cfg;
  Pattern black{{1, 1, 1, 1, 1, 1, 1, 1, 1}, 0, "black"};
  Pattern white{{0, 0, 0, 0, 0, 0, 0, 0, 0}, 0, "white"};
  VectorXd expect = VectorXd::Constant(10, 0.1);
  expect(0) = -0.1;
  CHECK(encode(black, cfg) == expect);
  CHECK(encode(white, cfg) == VectorXd::Constant(10, -0.1));
  VectorXd z(10);
  z << -0.1, 0.1, 0.1, 0.1, -0.1, 0.1, -0.1, 0.1, 0.1, 0.1;
  CHECK(encode(default_templates()[0], cfg) == z);
}

TEST_CASE("encode is injective on the default set") {
  const auto samples = to_samples(build_default_set(), PerceptronConfig<>{});
  for (std::size_t a = 0; a < samples.size(); ++a)
    for (std::size_t b = a + 1; b < samples.size(); ++b) CHECK(samples[a].voltages != samples[b].voltages);
}

TEST_CASE("input balance of the default set") {
  const auto samples = to_samples(build_default_set(), PerceptronConfig<>{});
  VectorXd mean = VectorXd::Zero(10);
  for (const auto& s : samples) mean += s.voltages;
  mean /= static_cast<double>(samples.size());
  CHECK((mean.array().abs() <= 0.1 + 1e-15).all());
  // 179 black pixels of 270 plus 30 bias inputs at -0.1 V:
  // (0.1 * (179 - 91) - 0.1 * 30) / 300 = 0.019333 V.
  CHECK(mean.mean() == doctest::Approx(0.058 / 3).epsilon(1e-12));
  CHECK(std::abs(mean.mean()) <= 0.02);
}

TEST_CASE("separability") {
  const PerceptronConfig<> cfg;
  const auto set = build_default_set();
  CHECK(check_separability(set, cfg));

  // Independent confirmation: a plain perceptron finds each one-vs-rest split.
  const auto samples = to_samples(set, cfg);
  Eigen::MatrixXd x(30, 10);
  for (int n = 0; n < 30; ++n) x.row(n) = samples[n].voltages.transpose();
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXi y(30);
    for (int n = 0; n < 30; ++n) y(n) = samples[n].label == c ? 1 : -1;
    CHECK(perceptron_finds_separator(x, y, 10000));
  }

  PatternSet contradiction;
  contradiction.patterns = {{{1, 0, 1, 0, 1, 0, 1, 0, 1}, 0, "a"}, {{1, 0, 1, 0, 1, 0, 1, 0, 1}, 1, "b"}};
  CHECK_FALSE(check_separability(contradiction, cfg));

  PatternSet single;
  single.patterns = {default_templates()[1]};
  CHECK(check_separability(single, cfg));
}

TEST_CASE("linear program feasibility on small cases") {
  // XOR with a bias coordinate is not separable; AND is.
  Eigen::MatrixXd x(4, 3);
  x << 0, 0, 1, 0, 1, 1, 1, 0, 1, 1, 1, 1;
  CHECK_FALSE(linearly_separable(x, (Eigen::VectorXi(4) << -1, 1, 1, -1).finished()));
  CHECK(linearly_separable(x, (Eigen::VectorXi(4) << -1, -1, -1, 1).finished()));
  CHECK(linearly_separable(Eigen::MatrixXd(0, 3), Eigen::VectorXi(0)));
}

TEST_CASE("template file loading") {
  const auto good = write_temp("memxbar_templates_ok.txt",
                               "# letters\n111010111 z\n\n101101010 v\n101111101 n\n");
  const auto bases = load_templates(good);
  REQUIRE(bases.size() == 3);
  CHECK(bases == default_templates());
  CHECK(build_pattern_set(bases).patterns == build_default_set().patterns);

  const auto bad = write_temp("memxbar_templates_bad.txt", "11101011 z\n");
  CHECK_THROWS_AS(load_templates(bad), std::runtime_error);
  const auto noname = write_temp("memxbar_templates_noname.txt", "111010111\n");
  CHECK_THROWS_AS(load_templates(noname), std::runtime_error);
  CHECK_THROWS_AS(load_templates("/nonexistent/templates.txt"), std::runtime_error);
  for (const auto& p : {good, bad, noname}) std::filesystem::remove(p);
}
