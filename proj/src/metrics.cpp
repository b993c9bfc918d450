#include "memdecay/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>

#include "memdecay/errors.hpp"
#include "memdecay/numeric.hpp"
#include "memdecay/rng.hpp"

namespace memdecay {

namespace {

void check_paired(std::span<const double> a, std::span<const double> b,
                  const char* op) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << op << ": length mismatch (" << a.size() << " vs " << b.size()
        << ")";
    throw LengthMismatchError(msg.str());
  }
  if (a.size() < 2) {
    throw TooFewItemsError(std::string(op) + ": need at least 2 items");
  }
}

// Midranks: ties share the average of the ranks they occupy.
std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson_impl(std::span<const double> a, std::span<const double> b,
                    const char* op) {
  CompensatedSum sa, sb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.add(a[i]);
    sb.add(b[i]);
  }
  double n = static_cast<double>(a.size());
  double ma = sa.value() / n;
  double mb = sb.value() / n;
  CompensatedSum sab, saa, sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma;
    double db = b[i] - mb;
    sab.add(da * db);
    saa.add(da * da);
    sbb.add(db * db);
  }
  double vaa = saa.value();
  double vbb = sbb.value();
  if (vaa == 0.0 || vbb == 0.0) {
    throw ZeroVarianceError(std::string(op) + ": an input is constant");
  }
  return sab.value() / std::sqrt(vaa * vbb);
}

}  // namespace

double pearson_r(std::span<const double> a, std::span<const double> b) {
  check_paired(a, b, "pearson_r");
  return pearson_impl(a, b, "pearson_r");
}

double spearman_rc(std::span<const double> a, std::span<const double> b) {
  check_paired(a, b, "spearman_rc");
  std::vector<double> ra = midranks(a);
  std::vector<double> rb = midranks(b);
  return pearson_impl(ra, rb, "spearman_rc");
}

double r_squared(std::span<const double> truth,
                 std::span<const double> pred) {
  check_paired(truth, pred, "r_squared");
  CompensatedSum st;
  for (double t : truth) st.add(t);
  double mean_t = st.value() / static_cast<double>(truth.size());
  CompensatedSum ss_res, ss_tot;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double r = truth[i] - pred[i];
    double d = truth[i] - mean_t;
    ss_res.add(r * r);
    ss_tot.add(d * d);
  }
  double tot = ss_tot.value();
  if (tot == 0.0) throw ZeroVarianceError("r_squared: truth is constant");
  return 1.0 - ss_res.value() / tot;
}

double curve_mae(const DecayCurve& truth, const DecayCurve& pred,
                 double lag_lo, double lag_hi, int n_samples) {
  if (!(lag_lo < lag_hi) || n_samples < 2) {
    throw InvalidRangeError("curve_mae: need lag_lo < lag_hi and >= 2 samples");
  }
  double step = (lag_hi - lag_lo) / static_cast<double>(n_samples - 1);
  CompensatedSum acc;
  for (int i = 0; i < n_samples; ++i) {
    double t = lag_lo + step * static_cast<double>(i);
    acc.add(std::abs(truth.at(t) - pred.at(t)));
  }
  return acc.value() / static_cast<double>(n_samples);
}

EvalReport evaluate_predictions(const VideoScoreTable& truth,
                                const VideoScoreTable& pred,
                                std::span<const int> eval_lags) {
  std::vector<const DecayCurve*> truth_curves;
  std::vector<const DecayCurve*> pred_curves;
  std::vector<std::string> missing;
  truth_curves.reserve(pred.entries.size());
  pred_curves.reserve(pred.entries.size());
  for (const auto& e : pred.entries) {
    const DecayCurve* t = truth.find(e.video_id);
    if (t == nullptr) {
      missing.push_back(e.video_id);
    } else {
      truth_curves.push_back(t);
      pred_curves.push_back(&e.curve);
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "evaluate_predictions: " << missing.size()
        << " predicted video(s) absent from truth:";
    for (const auto& id : missing) msg << ' ' << id;
    throw MissingVideosError(msg.str());
  }

  std::size_t n = pred_curves.size();
  int ref = truth.config.ref_lag;
  std::vector<double> truth_scores(n), pred_scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth_scores[i] = score_at_lag(*truth_curves[i], ref, false);
    pred_scores[i] = score_at_lag(*pred_curves[i], ref, false);
  }

  EvalReport report;
  report.n_videos = static_cast<std::int64_t>(n);
  report.rank_correlation = spearman_rc(truth_scores, pred_scores);
  for (int lag : eval_lags) {
    std::vector<double> tv(n), pv(n);
    for (std::size_t i = 0; i < n; ++i) {
      tv[i] = score_at_lag(*truth_curves[i], lag, false);
      pv[i] = score_at_lag(*pred_curves[i], lag, false);
    }
    report.r2_by_lag[lag] = r_squared(tv, pv);
  }
  CompensatedSum mae;
  for (std::size_t i = 0; i < n; ++i) {
    mae.add(curve_mae(*truth_curves[i], *pred_curves[i]));
  }
  report.curve_mae = mae.value() / static_cast<double>(n);
  return report;
}

EvalReport evaluate_predictions(const VideoScoreTable& truth,
                                const VideoScoreTable& pred) {
  const int default_lags[] = {40, 80, 160};
  return evaluate_predictions(truth, pred, default_lags);
}

namespace {

struct SplitHalfData {
  std::vector<std::uint32_t> record_participant;  // participant index per record
  std::vector<std::uint32_t> record_video;        // video index per record
  std::size_t n_participants = 0;
  std::size_t n_videos = 0;
};

SplitHalfData index_records(std::span<const AnnotationRecord> records) {
  SplitHalfData data;
  std::unordered_map<std::string, std::uint32_t> participants;
  std::unordered_map<std::string, std::uint32_t> videos;
  data.record_participant.reserve(records.size());
  data.record_video.reserve(records.size());
  for (const auto& r : records) {
    auto pit = participants
                   .try_emplace(r.participant_id,
                                static_cast<std::uint32_t>(participants.size()))
                   .first;
    auto vit =
        videos.try_emplace(r.video_id, static_cast<std::uint32_t>(videos.size()))
            .first;
    data.record_participant.push_back(pit->second);
    data.record_video.push_back(vit->second);
  }
  data.n_participants = participants.size();
  data.n_videos = videos.size();
  return data;
}

ConsistencyReport split_half_impl(std::span<const AnnotationRecord> records,
                                  int n_splits, std::uint64_t seed,
                                  bool parallel) {
  if (n_splits < 1) {
    throw std::invalid_argument("split_half_consistency: n_splits < 1");
  }
  SplitHalfData data = index_records(records);
  if (data.n_participants < 2) {
    throw TooFewParticipantsError(
        "split_half_consistency: need at least 2 participants, have " +
        std::to_string(data.n_participants));
  }

  std::vector<double> responses(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    responses[i] = static_cast<double>(records[i].response);
  }

  ConsistencyReport report;
  report.split_seed = seed;
  report.per_split_rho.resize(static_cast<std::size_t>(n_splits));
  report.per_split_dropped.resize(static_cast<std::size_t>(n_splits));

  std::exception_ptr failure;

  auto one_split = [&](int s) {
    std::vector<std::uint32_t> pool(data.n_participants);
    std::iota(pool.begin(), pool.end(), 0u);
    RandomStream stream(
        mix_key(seed, 0x73706c6974ULL, static_cast<std::uint64_t>(s)));
    stream.shuffle(pool);
    std::size_t half_a = (data.n_participants + 1) / 2;
    std::vector<std::uint8_t> in_b(data.n_participants, 0);
    for (std::size_t i = half_a; i < pool.size(); ++i) in_b[pool[i]] = 1;

    std::vector<double> sum(data.n_videos * 2, 0.0);
    std::vector<std::int64_t> count(data.n_videos * 2, 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
      std::size_t slot =
          data.record_video[i] * 2 + in_b[data.record_participant[i]];
      sum[slot] += responses[i];
      count[slot] += 1;
    }

    std::vector<double> rate_a, rate_b;
    rate_a.reserve(data.n_videos);
    rate_b.reserve(data.n_videos);
    std::int64_t dropped = 0;
    for (std::size_t v = 0; v < data.n_videos; ++v) {
      std::int64_t ca = count[v * 2];
      std::int64_t cb = count[v * 2 + 1];
      if (ca > 0 && cb > 0) {
        rate_a.push_back(sum[v * 2] / static_cast<double>(ca));
        rate_b.push_back(sum[v * 2 + 1] / static_cast<double>(cb));
      } else {
        ++dropped;
      }
    }
    report.per_split_rho[static_cast<std::size_t>(s)] =
        spearman_rc(rate_a, rate_b);
    report.per_split_dropped[static_cast<std::size_t>(s)] = dropped;
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n_splits; ++s) {
      try {
        one_split(s);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (int s = 0; s < n_splits; ++s) one_split(s);
  }
  if (failure) std::rethrow_exception(failure);

  CompensatedSum mean;
  for (double rho : report.per_split_rho) mean.add(rho);
  report.mean_rho = mean.value() / static_cast<double>(n_splits);
  return report;
}

}  // namespace

ConsistencyReport split_half_consistency(
    std::span<const AnnotationRecord> records, int n_splits,
    std::uint64_t seed) {
  return split_half_impl(records, n_splits, seed, true);
}

ConsistencyReport split_half_consistency_serial(
    std::span<const AnnotationRecord> records, int n_splits,
    std::uint64_t seed) {
  return split_half_impl(records, n_splits, seed, false);
}

}  // namespace memdecay
