#include "hgkt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hgkt/errors.hpp"

namespace hgkt {

double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return 0.5;
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

Metrics compute_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("metrics: scores and labels differ in length");
  Metrics m;
  m.n = scores.size();
  if (m.n == 0) return m;
  m.auc = auc_score(scores, labels);
  double hits = 0, abs_err = 0, sq_err = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double y = labels[i] ? 1.0 : 0.0;
    hits += ((scores[i] >= 0.5) == (labels[i] != 0)) ? 1.0 : 0.0;
    abs_err += std::abs(scores[i] - y);
    sq_err += (scores[i] - y) * (scores[i] - y);
  }
  const double n = static_cast<double>(m.n);
  m.acc = hits / n;
  m.mae = abs_err / n;
  m.rmse = std::sqrt(sq_err / n);
  return m;
}

MetricsReport MetricsReport::aggregate(std::span<const Metrics> runs) {
  MetricsReport r;
  r.runs.assign(runs.begin(), runs.end());
  if (runs.empty()) return r;
  const double k = static_cast<double>(runs.size());
  auto field = [&](auto member, double& mean, double& sd) {
    double s = 0;
    for (const auto& m : runs) s += m.*member;
    mean = s / k;
    double v = 0;
    for (const auto& m : runs) v += (m.*member - mean) * (m.*member - mean);
    sd = runs.size() > 1 ? std::sqrt(v / (k - 1.0)) : 0.0;
  };
  field(&Metrics::auc, r.mean.auc, r.sd.auc);
  field(&Metrics::acc, r.mean.acc, r.sd.acc);
  field(&Metrics::mae, r.mean.mae, r.sd.mae);
  field(&Metrics::rmse, r.mean.rmse, r.sd.rmse);
  for (const auto& m : runs) r.mean.n += m.n;
  return r;
}

}  // namespace hgkt
