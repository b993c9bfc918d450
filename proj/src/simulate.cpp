#include "memdecay/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memdecay/errors.hpp"
#include "memdecay/rng.hpp"

namespace memdecay {
namespace {

// Stream domains of the key schedule. Changing these changes every
// generated dataset, so they are part of the on-disk contract.
constexpr std::uint64_t kDomainM80 = 1;
constexpr std::uint64_t kDomainAlpha = 2;
constexpr std::uint64_t kDomainAnnotation = 3;
constexpr std::uint64_t kDomainSession = 4;

void check_dist(const ParamDist& d, const char* name, int n_videos) {
  switch (d.kind) {
    case ParamDist::Kind::Constant:
      if (!std::isfinite(d.value))
        throw InvalidSpecError(std::string(name) + ": non-finite constant");
      return;
    case ParamDist::Kind::Uniform:
      if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || d.lo > d.hi)
        throw InvalidSpecError(std::string(name) + ": bad uniform interval");
      return;
    case ParamDist::Kind::Explicit:
      if (d.values.size() != static_cast<std::size_t>(n_videos))
        throw InvalidSpecError(std::string(name) +
                               ": explicit values must match n_videos");
      for (double v : d.values)
        if (!std::isfinite(v))
          throw InvalidSpecError(std::string(name) + ": non-finite value");
      return;
  }
  throw InvalidSpecError(std::string(name) + ": unknown distribution kind");
}

void check_spec(const SimSpec& spec) {
  if (spec.n_videos < 1) throw InvalidSpecError("n_videos must be >= 1");
  if (spec.annotations_per_video < 1)
    throw InvalidSpecError("annotations_per_video must be >= 1");
  if (spec.n_participants < 1)
    throw InvalidSpecError("n_participants must be >= 1");
  if (spec.lag_lo < 1 || spec.lag_hi < spec.lag_lo)
    throw InvalidSpecError("lag range must satisfy 1 <= lag_lo <= lag_hi");
  if (!(spec.false_alarm_rate >= 0.0) || spec.false_alarm_rate >= 1.0)
    throw InvalidSpecError("false_alarm_rate must be in [0, 1)");
  check_dist(spec.m80_dist, "m80_dist", spec.n_videos);
  check_dist(spec.alpha_dist, "alpha_dist", spec.n_videos);
}

double sample_dist(const ParamDist& d, std::uint64_t seed,
                   std::uint64_t domain, int video) {
  switch (d.kind) {
    case ParamDist::Kind::Constant:
      return d.value;
    case ParamDist::Kind::Uniform: {
      RandomStream s(mix_key(seed, domain, static_cast<std::uint64_t>(video)));
      return d.lo + s.next_unit() * (d.hi - d.lo);
    }
    case ParamDist::Kind::Explicit:
      return d.values[static_cast<std::size_t>(video)];
  }
  return 0.0;
}

int id_width(int count, int min_width) {
  int w = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++w;
  return std::max(w, min_width);
}

std::string padded_id(char prefix, int index, int width) {
  const std::string digits = std::to_string(index);
  std::string id(1, prefix);
  if (digits.size() < static_cast<std::size_t>(width))
    id.append(static_cast<std::size_t>(width) - digits.size(), '0');
  id += digits;
  return id;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

DecayCurve true_curve(const SimSpec& spec, int video) {
  DecayCurve c;
  c.m_ref = sample_dist(spec.m80_dist, spec.seed, kDomainM80, video);
  c.alpha = sample_dist(spec.alpha_dist, spec.seed, kDomainAlpha, video);
  c.ref_lag = kDefaultRefLag;
  c.n_annotations = spec.annotations_per_video;
  return c;
}

void fill_video_records(const SimSpec& spec, int video,
                        const DecayCurve& curve,
                        const std::vector<std::string>& participants,
                        AnnotationRecord* out) {
  const std::string video_id =
      padded_id('v', video, id_width(spec.n_videos, 4));
  for (int j = 0; j < spec.annotations_per_video; ++j) {
    RandomStream s(mix_key(spec.seed, kDomainAnnotation,
                           static_cast<std::uint64_t>(video),
                           static_cast<std::uint64_t>(j)));
    AnnotationRecord& r = out[j];
    r.video_id = video_id;
    const std::size_t p =
        (static_cast<std::size_t>(video) *
             static_cast<std::size_t>(spec.annotations_per_video) +
         static_cast<std::size_t>(j)) %
        participants.size();
    r.participant_id = participants[p];
    r.lag = s.next_int(spec.lag_lo, spec.lag_hi);
    r.response = s.next_bernoulli(clamp01(curve.at(r.lag))) ? 1 : 0;
  }
}

SimResult simulate_impl(const SimSpec& spec, bool parallel) {
  check_spec(spec);
  SimResult result;
  result.truth = sim_truth_table(spec);

  const int pw = id_width(spec.n_participants, 3);
  result.participants.reserve(static_cast<std::size_t>(spec.n_participants));
  for (int p = 0; p < spec.n_participants; ++p)
    result.participants.push_back(padded_id('p', p, pw));

  const std::size_t per = static_cast<std::size_t>(spec.annotations_per_video);
  result.records.resize(static_cast<std::size_t>(spec.n_videos) * per);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int v = 0; v < spec.n_videos; ++v)
      fill_video_records(spec, v, result.truth.entries[v].curve,
                         result.participants,
                         result.records.data() + per * v);
  } else {
    for (int v = 0; v < spec.n_videos; ++v)
      fill_video_records(spec, v, result.truth.entries[v].curve,
                         result.participants,
                         result.records.data() + per * v);
  }
  return result;
}

}  // namespace

VideoScoreTable sim_truth_table(const SimSpec& spec) {
  check_spec(spec);
  VideoScoreTable table;
  const int vw = id_width(spec.n_videos, 4);
  table.entries.reserve(static_cast<std::size_t>(spec.n_videos));
  for (int v = 0; v < spec.n_videos; ++v)
    table.entries.push_back({padded_id('v', v, vw), true_curve(spec, v)});
  return table;
}

SimResult simulate_dataset(const SimSpec& spec) {
  return simulate_impl(spec, true);
}

SimResult simulate_dataset_serial(const SimSpec& spec) {
  return simulate_impl(spec, false);
}

StreamSession simulate_stream_session(const SimSpec& spec,
                                      const std::string& participant_id,
                                      int session_length) {
  check_spec(spec);
  if (participant_id.empty())
    throw InvalidSpecError("participant_id must be non-empty");
  if (session_length < spec.lag_lo + 2)
    throw InvalidSpecError("session too short for one repeat at lag_lo");

  // Space the repeat pairs so every drawn lag fits: with at most
  // L / (lag_hi + 2) targets, first showings sit early enough that the
  // second showing lands inside the session even at lag_hi.
  const int n_targets =
      std::max(1, session_length / (spec.lag_hi + 2));
  const int n_fillers = session_length - 2 * n_targets;
  if (spec.n_videos < n_targets + n_fillers)
    throw InvalidSpecError("not enough distinct videos for this session");

  RandomStream s(mix_key(spec.seed, kDomainSession, hash_bytes(participant_id)));

  // Partial Fisher-Yates picks the distinct videos shown this session.
  std::vector<int> pool(static_cast<std::size_t>(spec.n_videos));
  std::iota(pool.begin(), pool.end(), 0);
  const int need = n_targets + n_fillers;
  for (int i = 0; i < need; ++i) {
    const int j = s.next_int(i, spec.n_videos - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(j)]);
  }

  const int vw = id_width(spec.n_videos, 4);
  StreamSession session;
  session.participant_id = participant_id;
  session.events.resize(static_cast<std::size_t>(session_length));
  std::vector<char> used(static_cast<std::size_t>(session_length), 0);

  // Place each pair at the first free (f, f + lag + 1); sliding f keeps the
  // drawn lag exact.
  struct Placement {
    int video;
    int first;
    int second;
    int lag;
  };
  std::vector<Placement> placed;
  placed.reserve(static_cast<std::size_t>(n_targets));
  for (int k = 0; k < n_targets; ++k) {
    const int lag = s.next_int(spec.lag_lo, spec.lag_hi);
    int first = -1;
    for (int f = 0; f + lag + 1 < session_length; ++f) {
      if (!used[static_cast<std::size_t>(f)] &&
          !used[static_cast<std::size_t>(f + lag + 1)]) {
        first = f;
        break;
      }
    }
    if (first < 0)
      throw InvalidSpecError("session too congested to place a repeat");
    used[static_cast<std::size_t>(first)] = 1;
    used[static_cast<std::size_t>(first + lag + 1)] = 1;
    placed.push_back({pool[static_cast<std::size_t>(k)], first,
                      first + lag + 1, lag});
  }

  std::vector<int> repeat_video(static_cast<std::size_t>(session_length), -1);
  for (const Placement& p : placed) {
    const std::string id = padded_id('v', p.video, vw);
    StreamEvent& a = session.events[static_cast<std::size_t>(p.first)];
    a.video_id = id;
    StreamEvent& b = session.events[static_cast<std::size_t>(p.second)];
    b.video_id = id;
    b.is_repeat = true;
    b.lag = p.lag;
    repeat_video[static_cast<std::size_t>(p.second)] = p.video;
  }
  int next_filler = n_targets;
  for (int pos = 0; pos < session_length; ++pos) {
    StreamEvent& e = session.events[static_cast<std::size_t>(pos)];
    e.position = pos;
    if (!used[static_cast<std::size_t>(pos)])
      e.video_id = padded_id('v', pool[static_cast<std::size_t>(next_filler++)], vw);
  }

  // Keypress draws run in position order so the draw sequence is fixed.
  for (StreamEvent& e : session.events) {
    if (e.is_repeat) {
      const DecayCurve c =
          true_curve(spec, repeat_video[static_cast<std::size_t>(e.position)]);
      e.pressed = s.next_bernoulli(clamp01(c.at(e.lag)));
    } else if (spec.false_alarm_rate > 0.0) {
      e.pressed = s.next_bernoulli(spec.false_alarm_rate);
    }
  }
  return session;
}

std::vector<AnnotationRecord> to_annotation_records(
    const StreamSession& session) {
  std::vector<AnnotationRecord> records;
  for (const StreamEvent& e : session.events)
    if (e.is_repeat)
      records.push_back({e.video_id, session.participant_id, e.lag,
                         e.pressed ? 1 : 0});
  return records;
}

}  // namespace memdecay
