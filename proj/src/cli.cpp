#include "memdecay/cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memdecay/analysis.hpp"
#include "memdecay/core.hpp"
#include "memdecay/errors.hpp"
#include "memdecay/fit.hpp"
#include "memdecay/io.hpp"
#include "memdecay/metrics.hpp"
#include "memdecay/simulate.hpp"

namespace memdecay {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "-" writes to the session stdout; anything else is a file path.
void with_output(const std::string& path, std::ostream& out,
                 const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(out);
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write(f);
  f.flush();
  if (!f) throw IoError("cannot write " + path);
}

ColumnMap parse_columns(const std::string& mapping) {
  ColumnMap columns;
  if (mapping.empty()) return columns;
  std::istringstream in(mapping);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError("--columns entries must look like field=column");
    const std::string field = item.substr(0, eq);
    const std::string column = item.substr(eq + 1);
    if (field == "video_id")
      columns.video_id = column;
    else if (field == "participant_id")
      columns.participant_id = column;
    else if (field == "lag")
      columns.lag = column;
    else if (field == "response")
      columns.response = column;
    else
      throw UsageError("--columns: unknown field '" + field + "'");
  }
  return columns;
}

// "x" = constant, "lo:hi" = uniform.
ParamDist parse_dist(const std::string& text, const char* flag) {
  auto parse_one = [&](const std::string& part) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + part + "'");
    }
  };
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    return ParamDist::constant(parse_one(text));
  return ParamDist::uniform(parse_one(text.substr(0, colon)),
                            parse_one(text.substr(colon + 1)));
}

std::pair<int, int> parse_lag_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError("--lag-range must look like lo:hi");
  try {
    return {std::stoi(text.substr(0, colon)),
            std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--lag-range must look like lo:hi");
  }
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  int ref_lag = kDefaultRefLag;
  int iterations = kDefaultIterations;
  double tol = 0.0;
  std::string output = "-";
};

void print_summary(std::ostream& err, const std::string& path,
                   const IngestSummary& s) {
  err << "[memdecay] " << path << ": " << s.n_records << " records, "
      << s.n_videos << " videos, " << s.n_participants << " participants";
  if (s.n_records > 0)
    err << ", lags [" << s.lag_min << ", " << s.lag_max << "]";
  err << "\n";
}

std::vector<AnnotationRecord> load_annotations(const std::string& path,
                                               const std::string& columns,
                                               std::ostream& err) {
  const std::vector<AnnotationRecord> records =
      read_annotations_file(path, parse_columns(columns));
  print_summary(err, path, summarize_annotations(records));
  return records;
}

void warn_outside_range(std::ostream& err, int lag) {
  if (lag < kAnnotatedLagLo || lag > kAnnotatedLagHi)
    err << "[memdecay] warning: lag " << lag
        << " is outside the annotated range [" << kAnnotatedLagLo << ", "
        << kAnnotatedLagHi << "]; extrapolating\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"memdecay: linear memory-decay curves from repeat-detection "
               "annotations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "memdecay 0.1.0");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Seed for randomized commands");
  app.add_option("--ref-lag", g.ref_lag, "Reference lag of fitted scores");
  app.add_option("--iterations", g.iterations,
                 "Alternating fit passes (cap when --tol > 0)");
  app.add_option("--tol", g.tol,
                 "Stop fitting once both parameter deltas fall below this");
  app.add_option("-o,--output", g.output, "Output path, '-' for stdout");

  std::string annotations_path;
  std::string columns;
  std::string scores_path;
  std::string truth_path;
  std::string pred_path;
  bool serial = false;
  bool clamp = false;
  int lag = kDefaultRefLag;
  int splits = kDefaultSplits;
  std::vector<int> eval_lags = {40, kDefaultRefLag, 160};
  int groups = 10;
  int lag_bins = 20;
  SimSpec sim;
  std::string m80_text = "0.4:0.9";
  std::string alpha_text = "-0.001:0";
  std::string lag_range_text;

  CLI::App* ingest = app.add_subcommand(
      "ingest-check", "Validate an annotation CSV and print its summary");
  ingest->add_option("annotations", annotations_path, "Annotation CSV")
      ->required();
  ingest->add_option("--columns", columns,
                     "Map record fields to CSV columns, e.g. lag=delay");

  CLI::App* fit = app.add_subcommand(
      "fit", "Fit per-video decay curves and write a score file");
  fit->add_option("annotations", annotations_path, "Annotation CSV")
      ->required();
  fit->add_option("--columns", columns, "Field-to-column mapping");
  fit->add_flag("--serial", serial, "Use the single-threaded driver");

  CLI::App* score_at = app.add_subcommand(
      "score-at", "Evaluate stored curves at one lag");
  score_at->add_option("scores", scores_path, "Score file")->required();
  score_at->add_option("--lag", lag, "Lag to evaluate at")->required();
  score_at->add_flag("--clamp", clamp, "Clamp scores into [0, 1]");

  CLI::App* consistency = app.add_subcommand(
      "consistency", "Split-half participant consistency of raw hit rates");
  consistency->add_option("annotations", annotations_path, "Annotation CSV")
      ->required();
  consistency->add_option("--columns", columns, "Field-to-column mapping");
  consistency->add_option("--splits", splits, "Number of random splits");
  consistency->add_flag("--serial", serial, "Use the single-threaded driver");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Compare predicted scores against ground truth");
  evaluate->add_option("--truth", truth_path, "Ground-truth score file")
      ->required();
  evaluate->add_option("--pred", pred_path, "Predicted score file")
      ->required();
  evaluate->add_option("--lags", eval_lags, "Lags for per-lag R^2")
      ->delimiter(',');

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic annotation dataset");
  simulate->add_option("--videos", sim.n_videos, "Number of videos")
      ->required();
  simulate->add_option("--annotations", sim.annotations_per_video,
                       "Annotations per video");
  simulate->add_option("--participants", sim.n_participants,
                       "Participant pool size");
  simulate->add_option("--lag-range", lag_range_text, "Lag range lo:hi");
  simulate->add_option("--m80", m80_text,
                       "True score at lag 80: constant or lo:hi");
  simulate->add_option("--alpha", alpha_text,
                       "True slope: constant or lo:hi");
  simulate->add_option("--false-alarm-rate", sim.false_alarm_rate,
                       "Keypress rate on non-repeats in sessions");
  simulate->add_option("--truth", truth_path,
                       "Also write the true curves to this score file");
  simulate->add_flag("--serial", serial, "Use the single-threaded driver");

  CLI::App* deciles = app.add_subcommand(
      "analyze-deciles", "Pooled hit-rate curves by score decile");
  deciles->add_option("annotations", annotations_path, "Annotation CSV")
      ->required();
  deciles->add_option("--scores", scores_path, "Score file for ranking")
      ->required();
  deciles->add_option("--columns", columns, "Field-to-column mapping");
  deciles->add_option("--groups", groups, "Number of score groups");
  deciles->add_option("--lag-bins", lag_bins, "Number of lag bins");

  CLI::App* trend = app.add_subcommand(
      "analyze-trend", "Linear vs log-linear pooled hit-rate trend");
  trend->add_option("annotations", annotations_path, "Annotation CSV")
      ->required();
  trend->add_option("--columns", columns, "Field-to-column mapping");
  trend->add_option("--lag-bins", lag_bins, "Number of lag bins");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(ingest)) {
      const std::string bytes = read_file_bytes(annotations_path);
      std::istringstream in(bytes);
      std::vector<AnnotationRecord> records;
      try {
        records = read_annotations(in, parse_columns(columns));
      } catch (const SchemaError& e) {
        throw SchemaError(annotations_path + ": " + e.what());
      } catch (const ValueError& e) {
        throw ValueError(annotations_path + ": " + e.what());
      }
      const IngestSummary s = summarize_annotations(records);
      print_summary(err, annotations_path, s);
      nlohmann::json obj{{"format_version", kFormatVersion},
                         {"kind", "memdecay-ingest"},
                         {"n_records", s.n_records},
                         {"n_videos", s.n_videos},
                         {"n_participants", s.n_participants},
                         {"digest", fnv1a_hex(bytes)}};
      if (s.n_records > 0) {
        obj["lag_min"] = s.lag_min;
        obj["lag_max"] = s.lag_max;
      }
      with_output(g.output, out,
                  [&](std::ostream& o) { o << obj.dump(2) << "\n"; });
      return 0;
    }

    if (app.got_subcommand(fit)) {
      const std::string bytes = read_file_bytes(annotations_path);
      std::istringstream in(bytes);
      std::vector<AnnotationRecord> records;
      try {
        records = read_annotations(in, parse_columns(columns));
      } catch (const SchemaError& e) {
        throw SchemaError(annotations_path + ": " + e.what());
      } catch (const ValueError& e) {
        throw ValueError(annotations_path + ": " + e.what());
      }
      print_summary(err, annotations_path, summarize_annotations(records));
      FitConfig cfg;
      cfg.ref_lag = g.ref_lag;
      cfg.iterations = g.iterations;
      cfg.convergence_tol = g.tol;
      VideoScoreTable table =
          serial ? fit_all_serial(records, cfg) : fit_all(records, cfg);
      table.source_digest = fnv1a_hex(bytes);
      err << "[memdecay] fitted " << table.size() << " curves (ref lag "
          << cfg.ref_lag << ")\n";
      with_output(g.output, out,
                  [&](std::ostream& o) { write_scores(o, table); });
      return 0;
    }

    if (app.got_subcommand(score_at)) {
      const VideoScoreTable table = read_scores_file(scores_path);
      err << "[memdecay] read " << table.size() << " curves from "
          << scores_path << "\n";
      warn_outside_range(err, lag);
      with_output(g.output, out, [&](std::ostream& o) {
        o << "# format_version: " << kFormatVersion << "\n";
        o << "# lag: " << lag << "\n";
        o << "video_id,score\n";
        for (const VideoScoreTable::Entry& e : table.entries)
          o << e.video_id << ','
            << format_double(score_at_lag(e.curve, lag, clamp)) << '\n';
      });
      return 0;
    }

    if (app.got_subcommand(consistency)) {
      const std::vector<AnnotationRecord> records =
          load_annotations(annotations_path, columns, err);
      err << "[memdecay] effective seed: " << g.seed << "\n";
      const ConsistencyReport report =
          serial ? split_half_consistency_serial(records, splits, g.seed)
                 : split_half_consistency(records, splits, g.seed);
      err << "[memdecay] mean split-half rho over " << splits
          << " splits: " << report.mean_rho << "\n";
      with_output(g.output, out, [&](std::ostream& o) {
        o << consistency_report_json(report) << "\n";
      });
      return 0;
    }

    if (app.got_subcommand(evaluate)) {
      const VideoScoreTable truth = read_scores_file(truth_path);
      const VideoScoreTable pred = read_scores_file(pred_path);
      err << "[memdecay] " << truth.size() << " truth curves, " << pred.size()
          << " predicted curves\n";
      for (int l : eval_lags) warn_outside_range(err, l);
      const EvalReport report = evaluate_predictions(truth, pred, eval_lags);
      with_output(g.output, out, [&](std::ostream& o) {
        o << eval_report_json(report) << "\n";
      });
      return 0;
    }

    if (app.got_subcommand(simulate)) {
      if (!lag_range_text.empty()) {
        const auto [lo, hi] = parse_lag_range(lag_range_text);
        sim.lag_lo = lo;
        sim.lag_hi = hi;
      }
      sim.m80_dist = parse_dist(m80_text, "--m80");
      sim.alpha_dist = parse_dist(alpha_text, "--alpha");
      sim.seed = g.seed;
      err << "[memdecay] effective seed: " << sim.seed << "\n";
      const SimResult result =
          serial ? simulate_dataset_serial(sim) : simulate_dataset(sim);
      err << "[memdecay] simulated " << result.records.size()
          << " annotations for " << result.truth.size() << " videos\n";
      with_output(g.output, out, [&](std::ostream& o) {
        write_annotations(o, result.records);
      });
      if (!truth_path.empty())
        with_output(truth_path, out, [&](std::ostream& o) {
          write_scores(o, result.truth);
        });
      return 0;
    }

    if (app.got_subcommand(deciles)) {
      const std::vector<AnnotationRecord> records =
          load_annotations(annotations_path, columns, err);
      const VideoScoreTable table = read_scores_file(scores_path);
      const DecileTable result =
          decile_curves(records, table, groups, lag_bins);
      with_output(g.output, out, [&](std::ostream& o) {
        write_decile_table(o, result);
      });
      return 0;
    }

    if (app.got_subcommand(trend)) {
      const std::vector<AnnotationRecord> records =
          load_annotations(annotations_path, columns, err);
      const TrendReport report = compare_trend_fits(records, lag_bins);
      err << "[memdecay] r_linear=" << format_double(report.r_linear)
          << " r_loglinear=" << format_double(report.r_loglinear) << "\n";
      with_output(g.output, out, [&](std::ostream& o) {
        write_trend_table(o, report);
      });
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace memdecay
