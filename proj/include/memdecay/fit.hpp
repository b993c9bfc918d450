#pragma once

#include <span>
#include <utility>
#include <vector>

#include "memdecay/core.hpp"

namespace memdecay {

// One row per optimization pass; entry 0 is the initialization.
// rss is the residual sum of squares E at that pass's parameters and is
// non-increasing down the trace.
struct FitTrace {
  struct Entry {
    double alpha;
    double m_ref;
    double rss;
  };
  std::vector<Entry> entries;

  const Entry& final() const { return entries.back(); }
};

// Fits one video's decay curve by alternating closed-form updates:
// slope first against the current score, then score against the new slope,
// starting from (cfg.alpha_init, mean hit rate). With cfg.convergence_tol
// == 0 this runs exactly cfg.iterations passes; with tol > 0 it stops once
// both parameter deltas fall below tol.
//
// Degenerate designs (all lags equal, including the single-record case)
// leave the slope unidentified; the fit then returns alpha = 0 and the mean
// response.
//
// Throws EmptyInputError on no records, std::invalid_argument on mixed
// video ids or an invalid config.
std::pair<DecayCurve, FitTrace> fit_video(
    std::span<const AnnotationRecord> records, const FitConfig& cfg);

// Closed-form least squares of response on (lag - ref_lag): the joint
// minimizer the alternating scheme converges to. Kept as an independent
// check; shares only the accumulation helpers with fit_video.
DecayCurve ols_reference(std::span<const AnnotationRecord> records,
                         int ref_lag);

// Groups records by video_id and fits each video independently. Output is
// sorted by video_id. The default driver fans the per-video fits out to
// OpenMP threads; fit_all_serial is the plain-loop reference and produces
// bit-identical results.
VideoScoreTable fit_all(std::span<const AnnotationRecord> records,
                        const FitConfig& cfg);
VideoScoreTable fit_all_serial(std::span<const AnnotationRecord> records,
                               const FitConfig& cfg);

}  // namespace memdecay
