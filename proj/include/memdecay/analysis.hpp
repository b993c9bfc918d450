#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memdecay/core.hpp"

namespace memdecay {

struct DecileCell {
  int group = 0;  // 0 = lowest-scored videos
  int lag_bin = 0;
  double lag_bin_center = 0.0;
  std::optional<double> mean_hit_rate;  // empty cell when no annotations
  std::int64_t n = 0;

  bool operator==(const DecileCell&) const = default;
};

struct DecileTable {
  std::vector<DecileCell> cells;  // ordered by (group, lag_bin), complete grid
  int n_groups = 0;
  int lag_bins = 0;
  int lag_min = 0;
  int lag_max = 0;
};

// Ranks the annotated videos by their score at scores.config.ref_lag
// (ascending, ties broken by video_id), partitions them into n_groups of
// near-equal size with the remainder going to the lowest groups, and pools
// hit rates per (group, equal-width lag bin).
// Throws EmptyInputError, MissingScoresError, std::invalid_argument.
DecileTable decile_curves(std::span<const AnnotationRecord> records,
                          const VideoScoreTable& scores, int n_groups = 10,
                          int lag_bins = 20);

struct TrendBin {
  double lag_bin_center = 0.0;
  std::optional<double> mean_hit_rate;
  std::int64_t n = 0;

  bool operator==(const TrendBin&) const = default;
};

struct TrendReport {
  double r_linear = 0.0;     // pearson(bin center, mean hit rate)
  double r_loglinear = 0.0;  // pearson(ln bin center, mean hit rate)
  std::vector<TrendBin> bins;
};

// Pools hit rate per equal-width lag bin over the full record set, then
// correlates the non-empty bin means against bin centers and against
// ln(bin centers).
// Throws EmptyInputError, TooFewBinsError (< 3 non-empty bins),
// std::invalid_argument.
TrendReport compare_trend_fits(std::span<const AnnotationRecord> records,
                               int lag_bins = 20);

}  // namespace memdecay
