#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "memdecay/analysis.hpp"
#include "memdecay/errors.hpp"
#include "memdecay/rng.hpp"
#include "memdecay/simulate.hpp"

using namespace memdecay;

namespace {

// k hits out of n records for one video at one lag.
void add_records(std::vector<AnnotationRecord>& out, const std::string& video,
                 int lag, int hits, int n) {
  for (int i = 0; i < n; ++i)
    out.push_back({video, "p" + std::to_string(i), lag, i < hits ? 1 : 0});
}

VideoScoreTable flat_scores(const std::vector<std::string>& ids,
                            const std::vector<double>& m80s) {
  VideoScoreTable t;
  for (std::size_t i = 0; i < ids.size(); ++i)
    t.entries.push_back({ids[i], {m80s[i], 0.0, 80, 1}});
  std::sort(t.entries.begin(), t.entries.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  return t;
}

const DecileCell& cell_at(const DecileTable& t, int group, int bin) {
  return t.cells[static_cast<std::size_t>(group) *
                     static_cast<std::size_t>(t.lag_bins) +
                 static_cast<std::size_t>(bin)];
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("two score levels give ordered group curves") {
  std::vector<AnnotationRecord> recs;
  std::vector<std::string> ids;
  std::vector<double> m80s;
  for (int v = 0; v < 5; ++v) {
    const std::string low = "low" + std::to_string(v);
    const std::string high = "xhi" + std::to_string(v);
    for (const int lag : {10, 30, 50, 70}) {
      add_records(recs, low, lag, 1, 5);
      add_records(recs, high, lag, 4, 5);
    }
    ids.push_back(low);
    m80s.push_back(0.2);
    ids.push_back(high);
    m80s.push_back(0.8);
  }
  const DecileTable t = decile_curves(recs, flat_scores(ids, m80s), 2, 4);
  CHECK(t.n_groups == 2);
  CHECK(t.lag_bins == 4);
  CHECK(t.lag_min == 10);
  CHECK(t.lag_max == 70);
  REQUIRE(t.cells.size() == 8);
  for (int b = 0; b < 4; ++b) {
    const DecileCell& lo = cell_at(t, 0, b);
    const DecileCell& hi = cell_at(t, 1, b);
    CHECK(lo.group == 0);
    CHECK(hi.group == 1);
    CHECK(lo.lag_bin == b);
    CHECK(lo.lag_bin_center == 10.0 + (b + 0.5) * 15.0);
    CHECK(hi.lag_bin_center == lo.lag_bin_center);
    CHECK(lo.n == 25);
    CHECK(hi.n == 25);
    REQUIRE(lo.mean_hit_rate.has_value());
    REQUIRE(hi.mean_hit_rate.has_value());
    CHECK(*lo.mean_hit_rate == 0.2);
    CHECK(*hi.mean_hit_rate == 0.8);
    CHECK(*hi.mean_hit_rate > *lo.mean_hit_rate);
  }
}

TEST_CASE("equal scores fall back to id order") {
  std::vector<AnnotationRecord> recs;
  add_records(recs, "va", 20, 2, 2);
  add_records(recs, "vb", 20, 2, 2);
  add_records(recs, "vc", 20, 0, 2);
  add_records(recs, "vd", 20, 0, 2);
  const VideoScoreTable scores =
      flat_scores({"va", "vb", "vc", "vd"}, {0.5, 0.5, 0.5, 0.5});
  const DecileTable t = decile_curves(recs, scores, 2, 1);
  REQUIRE(t.cells.size() == 2);
  CHECK(*cell_at(t, 0, 0).mean_hit_rate == 1.0);  // va, vb
  CHECK(*cell_at(t, 1, 0).mean_hit_rate == 0.0);  // vc, vd
}

TEST_CASE("the remainder of an uneven split goes to the lowest groups") {
  std::vector<AnnotationRecord> recs;
  std::vector<std::string> ids;
  std::vector<double> m80s;
  for (int v = 0; v < 5; ++v) {
    const std::string id = "v" + std::to_string(v);
    add_records(recs, id, 40, 1, 2);
    ids.push_back(id);
    m80s.push_back(0.1 * v);
  }
  const DecileTable t = decile_curves(recs, flat_scores(ids, m80s), 2, 1);
  CHECK(cell_at(t, 0, 0).n == 6);  // three videos
  CHECK(cell_at(t, 1, 0).n == 4);  // two videos
}

TEST_CASE("one lag bin pools everything; identical lags collapse the grid") {
  std::vector<AnnotationRecord> recs;
  add_records(recs, "va", 12, 3, 4);
  add_records(recs, "va", 90, 1, 4);
  add_records(recs, "vb", 50, 2, 4);
  const VideoScoreTable scores = flat_scores({"va", "vb"}, {0.3, 0.7});
  const DecileTable t = decile_curves(recs, scores, 2, 1);
  REQUIRE(t.cells.size() == 2);
  CHECK(*cell_at(t, 0, 0).mean_hit_rate == 0.5);  // va: 4 of 8
  CHECK(*cell_at(t, 1, 0).mean_hit_rate == 0.5);  // vb: 2 of 4
  CHECK(cell_at(t, 0, 0).lag_bin_center == (12.0 + 90.0) / 2.0);

  std::vector<AnnotationRecord> flat;
  add_records(flat, "va", 33, 1, 2);
  add_records(flat, "vb", 33, 2, 2);
  const DecileTable ft = decile_curves(flat, scores, 2, 3);
  CHECK(ft.lag_min == 33);
  CHECK(ft.lag_max == 33);
  for (const DecileCell& c : ft.cells) CHECK(c.lag_bin_center == 33.0);
  CHECK(cell_at(ft, 0, 0).n == 2);
  CHECK(cell_at(ft, 1, 0).n == 2);
  CHECK(cell_at(ft, 0, 1).n == 0);
  CHECK(!cell_at(ft, 0, 1).mean_hit_rate.has_value());
}

TEST_CASE("cells without annotations stay empty but keep their slot") {
  std::vector<AnnotationRecord> recs;
  add_records(recs, "va", 10, 1, 3);
  add_records(recs, "va", 20, 1, 3);
  add_records(recs, "vb", 60, 2, 3);
  add_records(recs, "vb", 70, 2, 3);
  const VideoScoreTable scores = flat_scores({"va", "vb"}, {0.2, 0.8});
  const DecileTable t = decile_curves(recs, scores, 2, 2);
  REQUIRE(t.cells.size() == 4);
  CHECK(cell_at(t, 0, 0).n == 6);
  CHECK(cell_at(t, 0, 1).n == 0);
  CHECK(!cell_at(t, 0, 1).mean_hit_rate.has_value());
  CHECK(cell_at(t, 1, 0).n == 0);
  CHECK(cell_at(t, 1, 1).n == 6);
  int i = 0;
  for (int g = 0; g < 2; ++g)
    for (int b = 0; b < 2; ++b, ++i) {
      CHECK(t.cells[static_cast<std::size_t>(i)].group == g);
      CHECK(t.cells[static_cast<std::size_t>(i)].lag_bin == b);
    }
}

TEST_CASE("group sizes follow the ranking on simulated data") {
  SimSpec spec;
  spec.n_videos = 23;
  spec.annotations_per_video = 20;
  spec.seed = 5;
  const SimResult sim = simulate_dataset_serial(spec);
  const DecileTable t = decile_curves(sim.records, sim.truth, 10, 5);
  for (int g = 0; g < 10; ++g) {
    std::int64_t total = 0;
    for (int b = 0; b < 5; ++b) total += cell_at(t, g, b).n;
    CHECK(total == (g < 3 ? 60 : 40));  // 23 = 3 groups of 3 + 7 of 2
  }
}

TEST_CASE("decile table is invariant to record order and duplication") {
  SimSpec spec;
  spec.n_videos = 30;
  spec.annotations_per_video = 15;
  spec.seed = 8;
  const SimResult sim = simulate_dataset_serial(spec);
  const DecileTable base = decile_curves(sim.records, sim.truth, 5, 6);

  std::vector<AnnotationRecord> shuffled = sim.records;
  RandomStream s(mix_key(31, 0));
  s.shuffle(shuffled);
  REQUIRE(shuffled != sim.records);
  CHECK(decile_curves(shuffled, sim.truth, 5, 6).cells == base.cells);

  std::vector<AnnotationRecord> doubled = sim.records;
  doubled.insert(doubled.end(), sim.records.begin(), sim.records.end());
  const DecileTable twice = decile_curves(doubled, sim.truth, 5, 6);
  REQUIRE(twice.cells.size() == base.cells.size());
  for (std::size_t i = 0; i < base.cells.size(); ++i) {
    CHECK(twice.cells[i].n == 2 * base.cells[i].n);
    CHECK(twice.cells[i].mean_hit_rate == base.cells[i].mean_hit_rate);
  }
}

TEST_CASE("decile error cases") {
  const VideoScoreTable scores = flat_scores({"va"}, {0.5});
  CHECK_THROWS_AS(decile_curves({}, scores, 10, 20), EmptyInputError);

  std::vector<AnnotationRecord> recs;
  add_records(recs, "va", 40, 1, 2);
  CHECK_THROWS_AS(decile_curves(recs, scores, 1, 20), std::invalid_argument);
  CHECK_THROWS_AS(decile_curves(recs, scores, 2, 0), std::invalid_argument);

  add_records(recs, "vmystery", 50, 1, 2);
  try {
    decile_curves(recs, scores, 2, 4);
    FAIL("expected MissingScoresError");
  } catch (const MissingScoresError& e) {
    CHECK(std::string(e.what()).find("vmystery") != std::string::npos);
  }
}

TEST_CASE("a linear law in the bin means is recovered exactly") {
  std::vector<AnnotationRecord> recs;
  const int lags[4] = {18, 34, 50, 66};
  const int hits[4] = {4, 3, 2, 1};
  for (int i = 0; i < 4; ++i) add_records(recs, "v0", lags[i], hits[i], 4);

  const TrendReport r = compare_trend_fits(recs, 4);
  REQUIRE(r.bins.size() == 4);
  const double expect_centers[4] = {24.0, 36.0, 48.0, 60.0};
  const double expect_means[4] = {1.0, 0.75, 0.5, 0.25};
  for (int b = 0; b < 4; ++b) {
    CHECK(r.bins[static_cast<std::size_t>(b)].lag_bin_center ==
          expect_centers[b]);
    CHECK(r.bins[static_cast<std::size_t>(b)].n == 4);
    CHECK(*r.bins[static_cast<std::size_t>(b)].mean_hit_rate ==
          expect_means[b]);
  }
  // Bin rates sit on a straight line in the center, so the product-moment
  // normalization collapses to an exact square root.
  CHECK(r.r_linear == -1.0);
  CHECK(r.r_loglinear > -1.0);
  CHECK(std::abs(r.r_loglinear) < 1.0);
  CHECK(std::abs(r.r_linear) > std::abs(r.r_loglinear));
}

TEST_CASE("a logarithmic law in the bin means favors the log fit") {
  // Hit counts per thousand chosen on a line in ln(center), quantized to
  // the rate grid.
  std::vector<AnnotationRecord> recs;
  const int lags[4] = {18, 34, 50, 66};
  const int hits[4] = {900, 767, 673, 600};
  for (int i = 0; i < 4; ++i) add_records(recs, "v0", lags[i], hits[i], 1000);

  const TrendReport r = compare_trend_fits(recs, 4);
  CHECK(r.r_loglinear < -(1.0 - 1e-5));
  CHECK(r.r_loglinear > -1.0);
  CHECK(std::abs(r.r_loglinear) > std::abs(r.r_linear));
  CHECK(std::abs(r.r_linear) < 1.0 - 1e-3);
}

TEST_CASE("trend report is invariant to duplication and order") {
  SimSpec spec;
  spec.n_videos = 25;
  spec.annotations_per_video = 40;
  spec.seed = 13;
  const SimResult sim = simulate_dataset_serial(spec);
  const TrendReport base = compare_trend_fits(sim.records, 12);
  REQUIRE(base.bins.size() == 12);

  std::vector<AnnotationRecord> shuffled = sim.records;
  RandomStream s(mix_key(31, 1));
  s.shuffle(shuffled);
  const TrendReport reordered = compare_trend_fits(shuffled, 12);
  CHECK(reordered.r_linear == base.r_linear);
  CHECK(reordered.r_loglinear == base.r_loglinear);
  CHECK(reordered.bins == base.bins);

  std::vector<AnnotationRecord> doubled = sim.records;
  doubled.insert(doubled.end(), sim.records.begin(), sim.records.end());
  const TrendReport twice = compare_trend_fits(doubled, 12);
  CHECK(twice.r_linear == base.r_linear);
  CHECK(twice.r_loglinear == base.r_loglinear);
}

TEST_CASE("trend error cases") {
  CHECK_THROWS_AS(compare_trend_fits({}, 20), EmptyInputError);

  std::vector<AnnotationRecord> recs;
  add_records(recs, "va", 40, 1, 2);
  CHECK_THROWS_AS(compare_trend_fits(recs, 0), std::invalid_argument);

  // All lags identical: a single occupied bin is not a trend.
  CHECK_THROWS_AS(compare_trend_fits(recs, 20), TooFewBinsError);

  // Two occupied bins are still not enough.
  add_records(recs, "va", 200, 1, 2);
  CHECK_THROWS_AS(compare_trend_fits(recs, 2), TooFewBinsError);
}

}  // TEST_SUITE
