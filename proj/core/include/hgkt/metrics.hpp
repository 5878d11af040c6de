#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hgkt {

struct Metrics {
  double auc = 0.0;
  double acc = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

/// Area under the ROC curve from average ranks; tied scores count half.
/// Returns 0.5 when only one class is present (AUC is undefined there).
double auc_score(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUC, accuracy at threshold 0.5, MAE and RMSE over pooled predictions.
Metrics compute_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Mean and sample standard deviation over repeated runs.
struct MetricsReport {
  Metrics mean;
  Metrics sd;
  std::vector<Metrics> runs;

  static MetricsReport aggregate(std::span<const Metrics> runs);
};

}  // namespace hgkt
