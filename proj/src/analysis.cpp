#include "memdecay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "memdecay/errors.hpp"
#include "memdecay/metrics.hpp"
#include "memdecay/numeric.hpp"

namespace memdecay {
namespace {

struct LagBinning {
  int lo;
  int hi;
  int bins;
  double width;  // 0 when all lags coincide

  int bin_of(int lag) const {
    if (width <= 0.0) return 0;
    const int b = static_cast<int>((lag - lo) / width);
    return std::min(b, bins - 1);
  }
  double center(int b) const {
    if (width <= 0.0) return lo;
    return lo + (b + 0.5) * width;
  }
};

LagBinning make_binning(std::span<const AnnotationRecord> records, int bins) {
  int lo = records.front().lag;
  int hi = lo;
  for (const AnnotationRecord& r : records) {
    lo = std::min(lo, r.lag);
    hi = std::max(hi, r.lag);
  }
  return {lo, hi, bins, (hi - lo) / static_cast<double>(bins)};
}

struct CellSum {
  std::int64_t hits = 0;
  std::int64_t n = 0;
};

}  // namespace

DecileTable decile_curves(std::span<const AnnotationRecord> records,
                          const VideoScoreTable& scores, int n_groups,
                          int lag_bins) {
  if (records.empty()) throw EmptyInputError("decile_curves: no records");
  if (n_groups < 2)
    throw std::invalid_argument("decile_curves: n_groups must be >= 2");
  if (lag_bins < 1)
    throw std::invalid_argument("decile_curves: lag_bins must be >= 1");

  // Ranked video list: every annotated video must be scored.
  std::map<std::string, int> group_of;
  for (const AnnotationRecord& r : records) group_of.emplace(r.video_id, -1);
  struct Ranked {
    double score;
    const std::string* id;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(group_of.size());
  std::vector<std::string> missing;
  for (auto& [id, g] : group_of) {
    const DecayCurve* c = scores.find(id);
    if (c == nullptr) {
      missing.push_back(id);
      continue;
    }
    ranked.push_back({c->at(scores.config.ref_lag), &id});
  }
  if (!missing.empty()) {
    std::string msg = "decile_curves: unscored videos:";
    for (const std::string& id : missing) msg += " " + id;
    throw MissingScoresError(msg);
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score < b.score;
    return *a.id < *b.id;
  });

  // Near-equal partition; the remainder goes to the lowest groups.
  const int n_videos = static_cast<int>(ranked.size());
  const int base = n_videos / n_groups;
  const int rem = n_videos % n_groups;
  int next = 0;
  for (int g = 0; g < n_groups; ++g) {
    const int size = base + (g < rem ? 1 : 0);
    for (int k = 0; k < size; ++k)
      group_of[*ranked[static_cast<std::size_t>(next++)].id] = g;
  }

  const LagBinning binning = make_binning(records, lag_bins);
  std::vector<CellSum> sums(
      static_cast<std::size_t>(n_groups) * static_cast<std::size_t>(lag_bins));
  for (const AnnotationRecord& r : records) {
    const int g = group_of[r.video_id];
    CellSum& c = sums[static_cast<std::size_t>(g) *
                          static_cast<std::size_t>(lag_bins) +
                      static_cast<std::size_t>(binning.bin_of(r.lag))];
    c.hits += r.response;
    ++c.n;
  }

  DecileTable table;
  table.n_groups = n_groups;
  table.lag_bins = lag_bins;
  table.lag_min = binning.lo;
  table.lag_max = binning.hi;
  table.cells.reserve(sums.size());
  for (int g = 0; g < n_groups; ++g)
    for (int b = 0; b < lag_bins; ++b) {
      const CellSum& c = sums[static_cast<std::size_t>(g) *
                                  static_cast<std::size_t>(lag_bins) +
                              static_cast<std::size_t>(b)];
      DecileCell cell;
      cell.group = g;
      cell.lag_bin = b;
      cell.lag_bin_center = binning.center(b);
      cell.n = c.n;
      if (c.n > 0)
        cell.mean_hit_rate = static_cast<double>(c.hits) /
                             static_cast<double>(c.n);
      table.cells.push_back(cell);
    }
  return table;
}

TrendReport compare_trend_fits(std::span<const AnnotationRecord> records,
                               int lag_bins) {
  if (records.empty()) throw EmptyInputError("compare_trend_fits: no records");
  if (lag_bins < 1)
    throw std::invalid_argument("compare_trend_fits: lag_bins must be >= 1");

  const LagBinning binning = make_binning(records, lag_bins);
  std::vector<CellSum> sums(static_cast<std::size_t>(lag_bins));
  for (const AnnotationRecord& r : records) {
    CellSum& c = sums[static_cast<std::size_t>(binning.bin_of(r.lag))];
    c.hits += r.response;
    ++c.n;
  }

  TrendReport report;
  std::vector<double> centers;
  std::vector<double> log_centers;
  std::vector<double> means;
  for (int b = 0; b < lag_bins; ++b) {
    const CellSum& c = sums[static_cast<std::size_t>(b)];
    TrendBin bin;
    bin.lag_bin_center = binning.center(b);
    bin.n = c.n;
    if (c.n > 0) {
      bin.mean_hit_rate =
          static_cast<double>(c.hits) / static_cast<double>(c.n);
      centers.push_back(bin.lag_bin_center);
      log_centers.push_back(std::log(bin.lag_bin_center));
      means.push_back(*bin.mean_hit_rate);
    }
    report.bins.push_back(bin);
  }
  if (centers.size() < 3)
    throw TooFewBinsError("compare_trend_fits: fewer than 3 non-empty bins");

  report.r_linear = pearson_r(centers, means);
  report.r_loglinear = pearson_r(log_centers, means);
  return report;
}

}  // namespace memdecay
