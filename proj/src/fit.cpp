#include "memdecay/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "memdecay/errors.hpp"
#include "memdecay/numeric.hpp"

namespace memdecay {

namespace {

struct FitData {
  std::vector<double> d;  // lag - ref_lag
  std::vector<double> x;  // response
  double s_d = 0.0;
  double s_dd = 0.0;
  double s_dx = 0.0;
  double s_x = 0.0;
  double n = 0.0;
  bool degenerate_lags = false;  // all lags equal (incl. single record)
};

FitData accumulate(std::span<const AnnotationRecord> records, int ref_lag) {
  FitData f;
  f.d.reserve(records.size());
  f.x.reserve(records.size());
  CompensatedSum s_d, s_dd, s_dx, s_x;
  int lag_min = records.front().lag;
  int lag_max = records.front().lag;
  for (const auto& r : records) {
    double d = static_cast<double>(r.lag - ref_lag);
    double x = static_cast<double>(r.response);
    f.d.push_back(d);
    f.x.push_back(x);
    s_d.add(d);
    s_dd.add(d * d);
    s_dx.add(d * x);
    s_x.add(x);
    lag_min = std::min(lag_min, r.lag);
    lag_max = std::max(lag_max, r.lag);
  }
  f.s_d = s_d.value();
  f.s_dd = s_dd.value();
  f.s_dx = s_dx.value();
  f.s_x = s_x.value();
  f.n = static_cast<double>(records.size());
  f.degenerate_lags = (lag_min == lag_max);
  return f;
}

// Residual sum of squares at (alpha, m), accumulated in double-double so
// that per-pass decrements smaller than double rounding noise still order
// correctly in the recorded trace.
double residual_ss(const FitData& f, double alpha, double m) {
  dd::Dd acc{};
  for (std::size_t j = 0; j < f.d.size(); ++j) {
    dd::Dd r = dd::two_sum(f.x[j], -m);
    r = dd::sub(r, dd::two_prod(alpha, f.d[j]));
    acc = dd::add(acc, dd::mul(r, r));
  }
  return dd::to_double(acc);
}

void check_single_video(std::span<const AnnotationRecord> records) {
  const std::string& id = records.front().video_id;
  for (const auto& r : records) {
    if (r.video_id != id) {
      throw std::invalid_argument("fit_video: records span video ids '" + id +
                                  "' and '" + r.video_id + "'");
    }
  }
}

}  // namespace

std::pair<DecayCurve, FitTrace> fit_video(
    std::span<const AnnotationRecord> records, const FitConfig& cfg) {
  if (records.empty()) throw EmptyInputError("fit_video: no records");
  if (!cfg.valid()) throw std::invalid_argument("fit_video: invalid config");
  check_single_video(records);

  FitData f = accumulate(records, cfg.ref_lag);
  double mean_x = f.s_x / f.n;

  FitTrace trace;
  double alpha = cfg.alpha_init;
  double m = mean_x;
  trace.entries.push_back({alpha, m, residual_ss(f, alpha, m)});

  if (f.degenerate_lags) {
    // Slope unidentified; take the minimum-norm one.
    alpha = 0.0;
    m = mean_x;
    trace.entries.push_back({alpha, m, residual_ss(f, alpha, m)});
  } else {
    for (int pass = 0; pass < cfg.iterations; ++pass) {
      double alpha_next = (f.s_dx - m * f.s_d) / f.s_dd;
      double m_next = (f.s_x - alpha_next * f.s_d) / f.n;
      double da = std::abs(alpha_next - alpha);
      double dm = std::abs(m_next - m);
      alpha = alpha_next;
      m = m_next;
      trace.entries.push_back({alpha, m, residual_ss(f, alpha, m)});
      if (cfg.convergence_tol > 0.0 && da <= cfg.convergence_tol &&
          dm <= cfg.convergence_tol) {
        break;
      }
    }
  }

  DecayCurve curve{m, alpha, cfg.ref_lag,
                   static_cast<std::int64_t>(records.size())};
  return {curve, std::move(trace)};
}

DecayCurve ols_reference(std::span<const AnnotationRecord> records,
                         int ref_lag) {
  if (records.empty()) throw EmptyInputError("ols_reference: no records");
  if (ref_lag < 1) throw std::invalid_argument("ols_reference: ref_lag < 1");
  check_single_video(records);

  FitData f = accumulate(records, ref_lag);
  double mean_x = f.s_x / f.n;
  double alpha = 0.0;
  double m = mean_x;
  if (!f.degenerate_lags) {
    // cov/var of the centered regressor, in expanded form so the symmetric
    // case (s_d exactly 0) reproduces the one-pass fit bit for bit.
    alpha = (f.s_dx - f.s_d * (f.s_x / f.n)) / (f.s_dd - f.s_d * (f.s_d / f.n));
    m = mean_x - alpha * (f.s_d / f.n);
  }
  return DecayCurve{m, alpha, ref_lag,
                    static_cast<std::int64_t>(records.size())};
}

namespace {

VideoScoreTable fit_grouped(std::span<const AnnotationRecord> records,
                            const FitConfig& cfg, bool parallel) {
  if (records.empty()) throw EmptyInputError("fit_all: no records");
  if (!cfg.valid()) throw std::invalid_argument("fit_all: invalid config");

  // Group record indices per video, keys sorted for deterministic output.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    groups[records[i].video_id].push_back(i);
  }
  std::vector<const std::pair<const std::string, std::vector<std::size_t>>*>
      items;
  items.reserve(groups.size());
  for (const auto& kv : groups) items.push_back(&kv);

  VideoScoreTable table;
  table.config = cfg;
  table.entries.resize(items.size());

  auto fit_one = [&](std::size_t i) {
    std::vector<AnnotationRecord> group;
    group.reserve(items[i]->second.size());
    for (std::size_t idx : items[i]->second) group.push_back(records[idx]);
    auto [curve, trace] = fit_video(group, cfg);
    table.entries[i] = {items[i]->first, curve};
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0;
         i < static_cast<std::ptrdiff_t>(items.size()); ++i) {
      fit_one(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < items.size(); ++i) fit_one(i);
  }
  return table;
}

}  // namespace

VideoScoreTable fit_all(std::span<const AnnotationRecord> records,
                        const FitConfig& cfg) {
  return fit_grouped(records, cfg, true);
}

VideoScoreTable fit_all_serial(std::span<const AnnotationRecord> records,
                               const FitConfig& cfg) {
  return fit_grouped(records, cfg, false);
}

}  // namespace memdecay
