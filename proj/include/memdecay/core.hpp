#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace memdecay {

// Lag range covered by the memory-game annotations. The linear decay model
// is only validated inside it; evaluation outside is allowed but flagged as
// extrapolation in CLI diagnostics.
inline constexpr int kAnnotatedLagLo = 9;
inline constexpr int kAnnotatedLagHi = 200;

inline constexpr int kDefaultRefLag = 80;
inline constexpr double kDefaultAlphaInit = -5e-4;
inline constexpr int kDefaultIterations = 10;
inline constexpr int kDefaultAnnotationsPerVideo = 90;
inline constexpr int kDefaultSplits = 25;
inline constexpr int kCurveGridLo = 40;
inline constexpr int kCurveGridHi = 180;
inline constexpr int kCurveGridSamples = 100;

// One participant's binary recall outcome for one item at one repeat lag.
struct AnnotationRecord {
  std::string video_id;
  std::string participant_id;
  int lag = 0;       // intervening videos between the two showings, >= 1
  int response = 0;  // 1 = repeat detected, 0 = miss

  bool valid() const { return lag >= 1 && (response == 0 || response == 1); }

  bool operator==(const AnnotationRecord&) const = default;
};

// Fitted linear decay curve of one item: recall probability m_ref at the
// reference lag plus a slope in probability per unit lag. Parameters are
// stored unclamped; clamping into [0,1] is a consumption-time choice.
struct DecayCurve {
  double m_ref = 0.0;  // recall probability estimate at ref_lag
  double alpha = 0.0;  // slope, typically <= 0
  int ref_lag = kDefaultRefLag;
  std::int64_t n_annotations = 0;

  bool valid() const {
    return ref_lag >= 1 && n_annotations >= 1 && std::isfinite(m_ref) &&
           std::isfinite(alpha);
  }

  // Linear extrapolation to an arbitrary (possibly fractional) lag.
  double at(double t) const { return m_ref + alpha * (t - ref_lag); }

  bool operator==(const DecayCurve&) const = default;
};

// Recall probability at lag t; clamp truncates into [0, 1].
inline double score_at_lag(const DecayCurve& curve, int t, bool clamp) {
  double v = curve.at(static_cast<double>(t));
  if (clamp) v = std::clamp(v, 0.0, 1.0);
  return v;
}

// Intercept of the decay line at lag 0. May exceed 1; never clamped.
inline double base_memorability(const DecayCurve& curve) {
  return curve.m_ref - curve.alpha * curve.ref_lag;
}

// Reference lag, initialization and iteration policy for curve fitting.
// The defaults reproduce the fitting procedure unchanged: slope initialized
// to -5e-4, score to the mean hit rate, lag 80, exactly 10 passes.
struct FitConfig {
  int ref_lag = kDefaultRefLag;
  double alpha_init = kDefaultAlphaInit;
  int iterations = kDefaultIterations;
  // 0 = run exactly `iterations` passes; > 0 = stop once both parameter
  // deltas fall below it (iterations then acts as a cap).
  double convergence_tol = 0.0;

  bool valid() const {
    return ref_lag >= 1 && iterations >= 1 && convergence_tol >= 0.0 &&
           std::isfinite(alpha_init);
  }

  bool operator==(const FitConfig&) const = default;
};

// Per-video fitted curves, ordered by video_id, with fit provenance.
struct VideoScoreTable {
  struct Entry {
    std::string video_id;
    DecayCurve curve;

    bool operator==(const Entry&) const = default;
  };

  std::vector<Entry> entries;  // sorted by video_id, ids unique
  FitConfig config;
  std::string source_digest;  // fnv1a-64 hex of the ingested bytes, or ""

  const DecayCurve* find(const std::string& video_id) const {
    auto it = std::lower_bound(
        entries.begin(), entries.end(), video_id,
        [](const Entry& e, const std::string& id) { return e.video_id < id; });
    if (it == entries.end() || it->video_id != video_id) return nullptr;
    return &it->curve;
  }

  std::size_t size() const { return entries.size(); }
};

}  // namespace memdecay
