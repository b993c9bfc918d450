#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memdecay/core.hpp"

namespace memdecay {

// True-parameter distribution: a constant, a uniform interval, or one
// explicit value per video.
struct ParamDist {
  enum class Kind { Constant, Uniform, Explicit };
  Kind kind = Kind::Constant;
  double value = 0.0;       // Constant
  double lo = 0.0;          // Uniform
  double hi = 0.0;
  std::vector<double> values;  // Explicit, one per video

  static ParamDist constant(double v) { return {Kind::Constant, v, 0, 0, {}}; }
  static ParamDist uniform(double lo, double hi) {
    return {Kind::Uniform, 0, lo, hi, {}};
  }
  static ParamDist explicit_values(std::vector<double> v) {
    return {Kind::Explicit, 0, 0, 0, std::move(v)};
  }
};

// Ground-truth curve population plus session-structure parameters for the
// synthetic memory-game generator.
struct SimSpec {
  int n_videos = 0;
  int annotations_per_video = kDefaultAnnotationsPerVideo;
  int n_participants = 100;
  int lag_lo = kAnnotatedLagLo;
  int lag_hi = kAnnotatedLagHi;
  ParamDist m80_dist = ParamDist::uniform(0.4, 0.9);
  ParamDist alpha_dist = ParamDist::uniform(-1e-3, 0.0);
  double false_alarm_rate = 0.0;  // keypresses on non-repeats in sessions
  std::uint64_t seed = 0;
};

struct SimResult {
  VideoScoreTable truth;
  std::vector<AnnotationRecord> records;
  std::vector<std::string> participants;
};

// The ground-truth curves a spec generates, without any annotations.
VideoScoreTable sim_truth_table(const SimSpec& spec);

// Draws true curves per video, then for each annotation a lag uniform over
// [lag_lo, lag_hi] and a Bernoulli response with the clamped curve value as
// its parameter. Participants are assigned round-robin. Every draw comes
// from a stream keyed by (seed, video, annotation), so the parallel driver
// produces the same records as the serial one, byte for byte.
// Throws InvalidSpecError.
SimResult simulate_dataset(const SimSpec& spec);
SimResult simulate_dataset_serial(const SimSpec& spec);

// One position of an explicit presentation stream.
struct StreamEvent {
  int position = 0;
  std::string video_id;
  bool is_repeat = false;  // second showing of a repeated video
  int lag = 0;             // intervening videos; meaningful when is_repeat
  bool pressed = false;

  bool operator==(const StreamEvent&) const = default;
};

struct StreamSession {
  std::string participant_id;
  std::vector<StreamEvent> events;  // one per position, in order

  bool operator==(const StreamSession&) const = default;
};

// Builds an explicit video stream for one participant: repeat pairs whose
// lags are drawn uniformly from the spec's range (placement never distorts
// a drawn lag), fillers shown once, responses at repeats from the clamped
// curve value, filler keypresses at false_alarm_rate.
// Throws InvalidSpecError (also when the session cannot hold one repeat at
// lag_lo or there are not enough distinct videos to fill it).
StreamSession simulate_stream_session(const SimSpec& spec,
                                      const std::string& participant_id,
                                      int session_length);

// The repeat presentations of a session as annotation records.
std::vector<AnnotationRecord> to_annotation_records(
    const StreamSession& session);

}  // namespace memdecay
