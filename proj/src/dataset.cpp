#include "memxbar/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace memxbar {

std::vector<Pattern> default_templates() {
  return {
      {{1, 1, 1, 0, 1, 0, 1, 1, 1}, 0, "z"},
      {{1, 0, 1, 1, 0, 1, 0, 1, 0}, 1, "v"},
      {{1, 0, 1, 1, 1, 1, 1, 0, 1}, 2, "n"},
  };
}

PatternSet build_pattern_set(const std::vector<Pattern>& base_images) {
  PatternSet set;
  set.base_images = base_images;
  for (const auto& base : base_images) {
    set.patterns.push_back(base);
    for (int k = 0; k < 9; ++k) {
      Pattern flip = base;
      flip.pixels[k] ^= 1;
      flip.name = base.name + "-flip" + std::to_string(k);
      set.patterns.push_back(flip);
    }
  }
  return set;
}

PatternSet build_default_set() { return build_pattern_set(default_templates()); }

std::vector<Pattern> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file: " + path.string());
  std::vector<Pattern> bases;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string bits;
    std::string name;
    if (!(ss >> bits) || bits.front() == '#') continue;
    if (bits.size() != 9 || bits.find_first_not_of("01") != std::string::npos || !(ss >> name)) {
      throw std::runtime_error("template file line " + std::to_string(line_no) +
                               ": expected '<9 chars of 0/1> <name>'");
    }
    Pattern p;
    for (int k = 0; k < 9; ++k) p.pixels[k] = static_cast<std::uint8_t>(bits[k] - '0');
    p.label = static_cast<int>(bases.size());
    p.name = name;
    bases.push_back(p);
  }
  if (bases.empty()) throw std::runtime_error("template file has no patterns: " + path.string());
  return bases;
}

VectorXd encode(const Pattern& p, const PerceptronConfig<double>& cfg) {
  VectorXd v(10);
  v(0) = cfg.v_bias;
  for (int k = 0; k < 9; ++k) v(k + 1) = p.pixels[k] ? cfg.v_read : -cfg.v_read;
  return v;
}

std::vector<Sample<double>> to_samples(const PatternSet& set, const PerceptronConfig<double>& cfg) {
  std::vector<Sample<double>> out;
  out.reserve(set.patterns.size());
  for (const auto& p : set.patterns) out.push_back({encode(p, cfg), p.label});
  return out;
}

namespace {

// Phase-I simplex on  A z - s + a = b,  z, s, a >= 0  (b >= 0), minimizing
// sum(a) with Bland's rule. Returns the optimal objective.
double phase_one_minimum(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index nz = a.cols();
  for (Eigen::Index r = 0; r < m; ++r) {
    if (b(r) < 0) {
      a.row(r) *= -1;
      b(r) *= -1;
    }
  }
  // Columns: z (nz), surplus (m), artificial (m), rhs.
  const Eigen::Index n = nz + 2 * m;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + 1);
  t.topLeftCorner(m, nz) = a;
  t.block(0, nz, m, m) = -Eigen::MatrixXd::Identity(m, m);
  t.block(0, nz + m, m, m) = Eigen::MatrixXd::Identity(m, m);
  t.topRightCorner(m, 1) = b;
  // Reduced-cost row for min sum(a) with artificials basic.
  t.row(m).head(nz + m) = -t.topLeftCorner(m, nz + m).colwise().sum();
  t(m, n) = -b.sum();

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index r = 0; r < m; ++r) basis[r] = nz + m + r;

  constexpr double kEps = 1e-10;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (t(m, c) < -kEps) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (t(r, enter) > kEps) {
        const double ratio = t(r, n) / t(r, enter);
        if (leave < 0 || ratio < best - kEps ||
            (ratio <= best + kEps && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for phase I
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r != leave && t(r, enter) != 0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[leave] = enter;
  }
  return -t(m, n);
}

}  // namespace

bool linearly_separable(const Eigen::MatrixXd& points, const Eigen::VectorXi& labels) {
  if (points.rows() != labels.size()) {
    throw std::invalid_argument("linearly_separable: points/labels size mismatch");
  }
  if (points.rows() == 0) return true;
  const Eigen::Index d = points.cols();
  Eigen::MatrixXd a(points.rows(), 2 * d);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const double scale = points.row(r).cwiseAbs().maxCoeff();
    const Eigen::RowVectorXd row =
        static_cast<double>(labels(r)) * points.row(r) / (scale > 0 ? scale : 1.0);
    a.row(r) << row, -row;
  }
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(points.rows());
  return phase_one_minimum(a, b) < 1e-8;
}

bool check_separability(const PatternSet& set, const PerceptronConfig<double>& cfg) {
  if (set.patterns.empty()) return true;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(set.patterns.size()), 10);
  std::set<int> classes;
  for (std::size_t k = 0; k < set.patterns.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = encode(set.patterns[k], cfg).transpose();
    classes.insert(set.patterns[k].label);
  }
  for (int c : classes) {
    Eigen::VectorXi y(x.rows());
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      y(k) = set.patterns[static_cast<std::size_t>(k)].label == c ? 1 : -1;
    }
    if (!linearly_separable(x, y)) return false;
  }
  return true;
}

}  // namespace memxbar
