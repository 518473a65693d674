#pragma once

#include "memxbar/perceptron.hpp"
#include "memxbar/training.hpp"
#include "memxbar/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace memxbar {

/// 3x3 binary image, row-major, 1 = black.
struct Pattern {
  std::array<std::uint8_t, 9> pixels{};
  int label = 0;
  std::string name;

  bool operator==(const Pattern&) const = default;
};

struct PatternSet {
  std::vector<Pattern> patterns;
  std::vector<Pattern> base_images;
};

/// Default letter templates z, v, n (labels 0, 1, 2).
std::vector<Pattern> default_templates();

/// Each base image followed by its nine single-pixel flips, named
/// "<base>-flip<k>".
PatternSet build_pattern_set(const std::vector<Pattern>& base_images);

/// 30-pattern z/v/n benchmark.
PatternSet build_default_set();

/// Reads base images from a text file: one "<9 chars of 0/1> <name>" per
/// line; blank lines and lines starting with '#' are skipped. Labels follow
/// line order. Throws std::runtime_error on malformed input.
std::vector<Pattern> load_templates(const std::filesystem::path& path);

/// Input vector: element 0 is the bias voltage, elements 1..9 are +v_read for
/// black pixels and -v_read for white.
VectorXd encode(const Pattern& p, const PerceptronConfig<double>& cfg);

std::vector<Sample<double>> to_samples(const PatternSet& set, const PerceptronConfig<double>& cfg);

/// Exact feasibility test for {w : y_n (w . x_n) >= 1 for all n}, with the
/// points as rows of `points` and labels in {+1, -1}.
bool linearly_separable(const Eigen::MatrixXd& points, const Eigen::VectorXi& labels);

/// True iff every class is separable one-vs-rest on the encoded vectors.
bool check_separability(const PatternSet& set, const PerceptronConfig<double>& cfg = {});

}  // namespace memxbar
