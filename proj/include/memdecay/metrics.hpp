#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "memdecay/core.hpp"

namespace memdecay {

// Rank correlation, per-lag R^2 and decay-curve MAE of predicted vs
// ground-truth score tables.
struct EvalReport {
  double rank_correlation = 0.0;
  std::map<int, double> r2_by_lag;
  double curve_mae = 0.0;
  std::int64_t n_videos = 0;
};

// Split-half human-consistency summary: Spearman rho per random
// participant split plus the mean.
struct ConsistencyReport {
  double mean_rho = 0.0;
  std::vector<double> per_split_rho;
  // Videos excluded from a split because one half had no annotations.
  std::vector<std::int64_t> per_split_dropped;
  std::uint64_t split_seed = 0;
};

// Spearman rank correlation with midranks for ties (Pearson on ranks, not
// the 6*sum(d^2) shortcut, which is exact only without ties).
// Throws LengthMismatchError, TooFewItemsError (< 2), ZeroVarianceError.
double spearman_rc(std::span<const double> a, std::span<const double> b);

// Product-moment correlation; same error cases as spearman_rc.
double pearson_r(std::span<const double> a, std::span<const double> b);

// 1 - SS_res/SS_tot with SS_tot centered on mean(truth). May be negative.
// Throws LengthMismatchError, TooFewItemsError, ZeroVarianceError (constant
// truth).
double r_squared(std::span<const double> truth, std::span<const double> pred);

// Mean absolute gap between two decay curves over an evenly spaced
// inclusive grid of n_samples lags, evaluated unclamped.
// Throws InvalidRangeError.
double curve_mae(const DecayCurve& truth, const DecayCurve& pred,
                 double lag_lo = kCurveGridLo, double lag_hi = kCurveGridHi,
                 int n_samples = kCurveGridSamples);

// Compares predicted curves against ground truth: Spearman RC over scores
// at the reference lag, R^2 of unclamped scores at each eval lag, and the
// default-grid curve MAE averaged over matched videos. Every predicted
// video must exist in truth (MissingVideosError lists offenders).
EvalReport evaluate_predictions(const VideoScoreTable& truth,
                                const VideoScoreTable& pred,
                                std::span<const int> eval_lags);
EvalReport evaluate_predictions(const VideoScoreTable& truth,
                                const VideoScoreTable& pred);

// Splits the participant pool into two random halves n_splits times; for
// each split correlates the two halves' per-video raw hit rates. Odd pools
// put the extra participant in the first half. Splits are derived from
// (seed, split index) streams, so the report is reproducible and the
// parallel driver matches the serial one exactly.
// Throws TooFewParticipantsError.
ConsistencyReport split_half_consistency(
    std::span<const AnnotationRecord> records, int n_splits,
    std::uint64_t seed);
ConsistencyReport split_half_consistency_serial(
    std::span<const AnnotationRecord> records, int n_splits,
    std::uint64_t seed);

}  // namespace memdecay
