#include "hgkt/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hgkt::nn {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

GradCheckReport grad_check(const std::function<Tensor<double>()>& loss, std::vector<Tensor<double>> params,
                           GradCheckOptions options) {
  for (auto& p : params) p.zero_grad();
  {
    Tape<double> tape;
    TapeScope<double> scope(tape);
    tape.backward(loss());
  }
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(p.size(), 0.0);
  }

  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = params[t];
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    auto values = p.mutable_values();
    std::size_t taken = 0;
    for (std::size_t idx : coords) {
      if (taken == options.coordinates_per_tensor) break;
      const double saved = values[idx];
      values[idx] = saved + options.epsilon;
      BranchRecorder up_branches;
      const double up = loss().item();
      values[idx] = saved - options.epsilon;
      double down = 0.0;
      bool straddles = false;
      {
        BranchRecorder down_branches;
        down = loss().item();
        straddles = down_branches.pattern() != up_branches.pattern();
      }
      values[idx] = saved;
      if (straddles) {
        ++report.kinks;
        continue;
      }
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double err = relative_error(analytic[t][idx], numeric);
      ++taken;
      ++report.coordinates;
      if (err > report.max_relative_error || report.coordinates == 1) {
        report.max_relative_error = std::max(report.max_relative_error, err);
        report.worst = {t, idx, analytic[t][idx], numeric, err};
      }
    }
    report.per_tensor.push_back(taken);
  }
  for (auto& p : params) p.zero_grad();
  return report;
}

}  // namespace hgkt::nn
