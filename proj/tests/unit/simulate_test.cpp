#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "memdecay/errors.hpp"
#include "memdecay/simulate.hpp"

using namespace memdecay;

namespace {

SimSpec small_spec() {
  SimSpec spec;
  spec.n_videos = 12;
  spec.annotations_per_video = 30;
  spec.n_participants = 7;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("a spec reproduces the same dataset every time") {
  const SimSpec spec = small_spec();
  const SimResult a = simulate_dataset_serial(spec);
  const SimResult b = simulate_dataset_serial(spec);
  CHECK(a.records == b.records);
  CHECK(a.truth.entries == b.truth.entries);
  CHECK(a.participants == b.participants);

  SimSpec other = spec;
  other.seed = 43;
  const SimResult c = simulate_dataset_serial(other);
  CHECK(a.records != c.records);
  CHECK(a.truth.entries != c.truth.entries);
}

TEST_CASE("truth table layout and parameter ranges") {
  const SimSpec spec = small_spec();
  const SimResult r = simulate_dataset_serial(spec);
  CHECK(sim_truth_table(spec).entries == r.truth.entries);
  REQUIRE(r.truth.entries.size() == 12);
  CHECK(r.truth.entries.front().video_id == "v0000");
  CHECK(r.truth.entries.back().video_id == "v0011");
  for (std::size_t v = 1; v < r.truth.entries.size(); ++v)
    CHECK(r.truth.entries[v - 1].video_id < r.truth.entries[v].video_id);
  for (const auto& e : r.truth.entries) {
    CHECK(e.curve.ref_lag == 80);
    CHECK(e.curve.n_annotations == 30);
    CHECK(e.curve.m_ref >= 0.4);
    CHECK(e.curve.m_ref < 0.9);
    CHECK(e.curve.alpha >= -1e-3);
    CHECK(e.curve.alpha < 0.0);
  }
}

TEST_CASE("explicit parameter lists are used verbatim") {
  SimSpec spec = small_spec();
  spec.n_videos = 3;
  spec.m80_dist = ParamDist::explicit_values({0.5, 0.6, 0.7});
  spec.alpha_dist = ParamDist::explicit_values({-1e-4, -2e-4, -3e-4});
  const VideoScoreTable t = sim_truth_table(spec);
  REQUIRE(t.entries.size() == 3);
  CHECK(t.entries[0].curve.m_ref == 0.5);
  CHECK(t.entries[1].curve.m_ref == 0.6);
  CHECK(t.entries[2].curve.m_ref == 0.7);
  CHECK(t.entries[0].curve.alpha == -1e-4);
  CHECK(t.entries[1].curve.alpha == -2e-4);
  CHECK(t.entries[2].curve.alpha == -3e-4);
}

TEST_CASE("saturated and floored curves produce constant responses") {
  SimSpec spec = small_spec();
  spec.m80_dist = ParamDist::constant(1.0);
  spec.alpha_dist = ParamDist::constant(0.0);
  for (const auto& r : simulate_dataset_serial(spec).records)
    CHECK(r.response == 1);

  spec.m80_dist = ParamDist::constant(0.0);
  for (const auto& r : simulate_dataset_serial(spec).records)
    CHECK(r.response == 0);

  // Clamping keeps an out-of-range curve a valid Bernoulli parameter.
  spec.m80_dist = ParamDist::constant(2.0);
  for (const auto& r : simulate_dataset_serial(spec).records)
    CHECK(r.response == 1);
}

TEST_CASE("flat curve at one half hits one half on average") {
  SimSpec spec;
  spec.n_videos = 1;
  spec.annotations_per_video = 100000;
  spec.m80_dist = ParamDist::constant(0.5);
  spec.alpha_dist = ParamDist::constant(0.0);
  spec.seed = 9;
  const SimResult r = simulate_dataset_serial(spec);
  double hits = 0;
  for (const auto& rec : r.records) hits += rec.response;
  // Five sigma for 1e5 fair Bernoulli draws.
  CHECK(std::abs(hits / 100000.0 - 0.5) < 0.008);
}

TEST_CASE("participants rotate round-robin over the roster") {
  const SimSpec spec = small_spec();
  const SimResult r = simulate_dataset_serial(spec);
  REQUIRE(r.participants.size() == 7);
  CHECK(r.participants.front() == "p000");
  CHECK(r.participants.back() == "p006");
  REQUIRE(r.records.size() == 12u * 30u);
  for (std::size_t i = 0; i < r.records.size(); ++i)
    CHECK(r.records[i].participant_id == r.participants[i % 7]);
}

TEST_CASE("lags stay inside the configured range") {
  SimSpec spec = small_spec();
  spec.lag_lo = 15;
  spec.lag_hi = 40;
  bool saw_lo = false, saw_hi = false;
  for (const auto& rec : simulate_dataset_serial(spec).records) {
    CHECK(rec.lag >= 15);
    CHECK(rec.lag <= 40);
    saw_lo = saw_lo || rec.lag == 15;
    saw_hi = saw_hi || rec.lag == 40;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
}

TEST_CASE("responses track the generating curve per lag band") {
  SimSpec spec;
  spec.n_videos = 1;
  spec.annotations_per_video = 200000;
  spec.m80_dist = ParamDist::constant(0.7);
  spec.alpha_dist = ParamDist::constant(-1e-3);
  spec.seed = 4;
  const SimResult r = simulate_dataset_serial(spec);
  const DecayCurve& curve = r.truth.entries.front().curve;

  // Ten lag bands; within each the observed hit count must sit inside a
  // five-sigma interval of its exact expectation under the curve.
  double sum_x[10] = {}, sum_p[10] = {}, sum_pq[10] = {};
  for (const auto& rec : r.records) {
    const int b = (rec.lag - 9) * 10 / 192;
    const double p = curve.at(rec.lag);
    sum_x[b] += rec.response;
    sum_p[b] += p;
    sum_pq[b] += p * (1.0 - p);
  }
  for (int b = 0; b < 10; ++b) {
    REQUIRE(sum_pq[b] > 0.0);
    CHECK(std::abs(sum_x[b] - sum_p[b]) < 5.0 * std::sqrt(sum_pq[b]));
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(simulate_dataset_serial(SimSpec{}), InvalidSpecError);

  SimSpec spec = small_spec();
  spec.annotations_per_video = 0;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.n_participants = 0;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.lag_lo = 0;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.lag_hi = spec.lag_lo - 1;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.false_alarm_rate = 1.0;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);
  spec.false_alarm_rate = -0.1;
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.m80_dist = ParamDist::explicit_values({0.5, 0.6});  // 12 videos
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.alpha_dist = ParamDist::uniform(0.0, -1e-3);
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);

  spec = small_spec();
  spec.m80_dist = ParamDist::constant(
      std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(simulate_dataset_serial(spec), InvalidSpecError);
}

TEST_CASE("a minimal session is a single exact pair") {
  SimSpec spec;
  spec.n_videos = 10;
  spec.lag_lo = 9;
  spec.lag_hi = 9;
  spec.seed = 3;
  const StreamSession s = simulate_stream_session(spec, "p7", 11);
  CHECK(s.participant_id == "p7");
  REQUIRE(s.events.size() == 11);
  for (int pos = 0; pos < 11; ++pos) {
    CHECK(s.events[static_cast<std::size_t>(pos)].position == pos);
    CHECK(!s.events[static_cast<std::size_t>(pos)].video_id.empty());
  }
  CHECK(!s.events[0].is_repeat);
  CHECK(s.events[10].is_repeat);
  CHECK(s.events[10].lag == 9);
  CHECK(s.events[10].video_id == s.events[0].video_id);
  for (int pos = 1; pos < 10; ++pos) {
    CHECK(!s.events[static_cast<std::size_t>(pos)].is_repeat);
    CHECK(s.events[static_cast<std::size_t>(pos)].video_id !=
          s.events[0].video_id);
  }

  const std::vector<AnnotationRecord> recs = to_annotation_records(s);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].video_id == s.events[0].video_id);
  CHECK(recs[0].participant_id == "p7");
  CHECK(recs[0].lag == 9);
  CHECK(recs[0].response == (s.events[10].pressed ? 1 : 0));
}

TEST_CASE("session structure: exact lags, distinct fillers, no stray presses") {
  SimSpec spec;
  spec.n_videos = 300;
  spec.lag_lo = 9;
  spec.lag_hi = 28;
  spec.m80_dist = ParamDist::constant(1.0);
  spec.alpha_dist = ParamDist::constant(0.0);
  spec.seed = 11;
  const StreamSession s = simulate_stream_session(spec, "p0", 300);
  REQUIRE(s.events.size() == 300);

  std::map<std::string, int> shows;
  int repeats = 0;
  for (const StreamEvent& e : s.events) {
    ++shows[e.video_id];
    if (e.is_repeat) {
      ++repeats;
      CHECK(e.lag >= 9);
      CHECK(e.lag <= 28);
      const StreamEvent& first =
          s.events[static_cast<std::size_t>(e.position - e.lag - 1)];
      CHECK(first.video_id == e.video_id);
      CHECK(!first.is_repeat);
      CHECK(e.pressed);  // certain hit under a saturated curve
    } else {
      CHECK(!e.pressed);  // false_alarm_rate is zero
    }
  }
  CHECK(repeats == 10);
  int twice = 0;
  for (const auto& [id, n] : shows) {
    CHECK(n <= 2);
    if (n == 2) ++twice;
  }
  CHECK(twice == 10);
  CHECK(shows.size() == 300u - 10u);
  CHECK(to_annotation_records(s).size() == 10);
}

TEST_CASE("filler keypresses follow the false-alarm rate") {
  SimSpec spec;
  spec.n_videos = 300;
  spec.lag_lo = 9;
  spec.lag_hi = 28;
  spec.m80_dist = ParamDist::constant(1.0);
  spec.alpha_dist = ParamDist::constant(0.0);
  spec.false_alarm_rate = 0.5;
  spec.seed = 11;
  const StreamSession s = simulate_stream_session(spec, "p0", 300);
  int pressed = 0, silent = 0;
  for (const StreamEvent& e : s.events) {
    if (e.is_repeat) {
      CHECK(e.pressed);
    } else {
      (e.pressed ? pressed : silent) += 1;
    }
  }
  // Fillers plus the first showings of targets all draw a false alarm.
  CHECK(pressed + silent == 290);
  CHECK(pressed > 95);
  CHECK(silent > 95);
}

TEST_CASE("sessions are deterministic per participant") {
  SimSpec spec;
  spec.n_videos = 300;
  spec.lag_lo = 9;
  spec.lag_hi = 28;
  spec.seed = 6;
  const StreamSession a = simulate_stream_session(spec, "pa", 300);
  const StreamSession b = simulate_stream_session(spec, "pa", 300);
  CHECK(a == b);
  const StreamSession c = simulate_stream_session(spec, "pb", 300);
  CHECK(a.events != c.events);
}

TEST_CASE("impossible sessions are rejected") {
  SimSpec spec;
  spec.n_videos = 300;
  CHECK_THROWS_AS(simulate_stream_session(spec, "p0", 10), InvalidSpecError);
  CHECK_THROWS_AS(simulate_stream_session(spec, "", 300), InvalidSpecError);

  spec.lag_lo = 9;
  spec.lag_hi = 9;
  spec.n_videos = 9;  // one target + nine fillers will not fit
  CHECK_THROWS_AS(simulate_stream_session(spec, "p0", 11), InvalidSpecError);
}

TEST_CASE("placement does not distort the lag distribution") {
  SimSpec spec;
  spec.n_videos = 300;
  spec.lag_lo = 9;
  spec.lag_hi = 28;
  spec.m80_dist = ParamDist::constant(0.8);
  spec.alpha_dist = ParamDist::constant(0.0);
  spec.seed = 7;
  std::vector<std::int64_t> counts(20, 0);
  const int sessions = 10000;
  for (int i = 0; i < sessions; ++i) {
    const StreamSession s =
        simulate_stream_session(spec, "q" + std::to_string(i), 300);
    for (const StreamEvent& e : s.events)
      if (e.is_repeat) ++counts[static_cast<std::size_t>(e.lag - 9)];
  }
  double total = 0;
  for (const auto c : counts) total += static_cast<double>(c);
  CHECK(total == 10.0 * sessions);
  const double expected = total / 20.0;
  double chi2 = 0;
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // 1% upper critical value of chi-squared with 19 degrees of freedom.
  CHECK(chi2 < 36.19086912927004);
}

}  // TEST_SUITE
