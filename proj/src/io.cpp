#include "memdecay/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memdecay/errors.hpp"
#include "memdecay/rng.hpp"

namespace memdecay {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int parse_int_field(std::string_view text, const char* name, int line_no) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw SchemaError("line " + std::to_string(line_no) + ": " + name +
                      " is not an integer: '" + std::string(text) + "'");
  return value;
}

struct ColumnIndices {
  std::size_t video_id;
  std::size_t participant_id;
  std::size_t lag;
  std::size_t response;
  std::size_t n_columns;
};

ColumnIndices resolve_header(std::string_view header, const ColumnMap& columns,
                             int line_no) {
  const std::vector<std::string_view> names = split_fields(header);
  auto find = [&](const std::string& wanted) {
    std::size_t found = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != wanted) continue;
      if (found != names.size())
        throw SchemaError("line " + std::to_string(line_no) +
                          ": duplicate column '" + wanted + "'");
      found = i;
    }
    if (found == names.size())
      throw SchemaError("line " + std::to_string(line_no) +
                        ": missing column '" + wanted + "'");
    return found;
  };
  return {find(columns.video_id), find(columns.participant_id),
          find(columns.lag), find(columns.response), names.size()};
}

std::string prefix_path(const std::string& path, const std::string& what) {
  return path + ": " + what;
}

json metadata_line(const VideoScoreTable& table) {
  return json{{"format_version", kFormatVersion},
              {"kind", "memdecay-scores"},
              {"ref_lag", table.config.ref_lag},
              {"alpha_init", table.config.alpha_init},
              {"iterations", table.config.iterations},
              {"convergence_tol", table.config.convergence_tol},
              {"source_digest", table.source_digest}};
}

const json& require_key(const json& obj, const char* key, int line_no) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError("line " + std::to_string(line_no) + ": missing key '" +
                      key + "'");
  return *it;
}

json parse_json_line(const std::string& line, int line_no) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw SchemaError("line " + std::to_string(line_no) +
                      ": not a JSON object");
  return obj;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<AnnotationRecord> read_annotations(std::istream& in,
                                               const ColumnMap& columns) {
  std::vector<AnnotationRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  ColumnIndices idx{};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (!header_seen) {
      idx = resolve_header(line, columns, line_no);
      header_seen = true;
      continue;
    }
    if (line.empty())
      throw SchemaError("line " + std::to_string(line_no) + ": empty line");
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != idx.n_columns)
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(idx.n_columns) + " fields, got " +
                        std::to_string(fields.size()));
    AnnotationRecord r;
    r.video_id = std::string(fields[idx.video_id]);
    r.participant_id = std::string(fields[idx.participant_id]);
    if (r.video_id.empty())
      throw SchemaError("line " + std::to_string(line_no) +
                        ": empty video_id");
    if (r.participant_id.empty())
      throw SchemaError("line " + std::to_string(line_no) +
                        ": empty participant_id");
    r.lag = parse_int_field(fields[idx.lag], "lag", line_no);
    r.response = parse_int_field(fields[idx.response], "response", line_no);
    if (r.lag < 1)
      throw ValueError("line " + std::to_string(line_no) +
                       ": lag must be >= 1, got " + std::to_string(r.lag));
    if (r.response != 0 && r.response != 1)
      throw ValueError("line " + std::to_string(line_no) +
                       ": response must be 0 or 1, got " +
                       std::to_string(r.response));
    records.push_back(std::move(r));
  }
  if (!header_seen) throw SchemaError("missing header line");
  return records;
}

std::vector<AnnotationRecord> read_annotations_file(const std::string& path,
                                                    const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_annotations(in, columns);
  } catch (const SchemaError& e) {
    throw SchemaError(prefix_path(path, e.what()));
  } catch (const ValueError& e) {
    throw ValueError(prefix_path(path, e.what()));
  }
}

void write_annotations(std::ostream& out,
                       std::span<const AnnotationRecord> records) {
  out << "# format_version: " << kFormatVersion << "\n";
  out << "video_id,participant_id,lag,response\n";
  for (const AnnotationRecord& r : records)
    out << r.video_id << ',' << r.participant_id << ',' << r.lag << ','
        << r.response << '\n';
}

IngestSummary summarize_annotations(
    std::span<const AnnotationRecord> records) {
  IngestSummary s;
  s.n_records = static_cast<std::int64_t>(records.size());
  if (records.empty()) return s;
  std::set<std::string_view> videos;
  std::set<std::string_view> participants;
  s.lag_min = records.front().lag;
  s.lag_max = records.front().lag;
  for (const AnnotationRecord& r : records) {
    videos.insert(r.video_id);
    participants.insert(r.participant_id);
    s.lag_min = std::min(s.lag_min, r.lag);
    s.lag_max = std::max(s.lag_max, r.lag);
  }
  s.n_videos = static_cast<std::int64_t>(videos.size());
  s.n_participants = static_cast<std::int64_t>(participants.size());
  return s;
}

std::string fnv1a_hex(std::string_view bytes) {
  const std::uint64_t h = hash_bytes(bytes);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return std::move(buf).str();
}

void write_scores(std::ostream& out, const VideoScoreTable& table) {
  out << metadata_line(table).dump() << '\n';
  for (const VideoScoreTable::Entry& e : table.entries) {
    const json row{{"video_id", e.video_id},
                   {"m80", e.curve.m_ref},
                   {"alpha", e.curve.alpha},
                   {"ref_lag", e.curve.ref_lag},
                   {"n", e.curve.n_annotations}};
    out << row.dump() << '\n';
  }
}

VideoScoreTable read_scores(std::istream& in) {
  VideoScoreTable table;
  std::string line;
  int line_no = 0;
  bool meta_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty())
      throw SchemaError("line " + std::to_string(line_no) + ": empty line");
    const json obj = parse_json_line(line, line_no);
    try {
      if (!meta_seen) {
        if (require_key(obj, "kind", line_no) != "memdecay-scores")
          throw SchemaError("line 1: kind is not 'memdecay-scores'");
        if (require_key(obj, "format_version", line_no) != kFormatVersion)
          throw SchemaError("line 1: unsupported format_version");
        table.config.ref_lag = require_key(obj, "ref_lag", line_no).get<int>();
        table.config.alpha_init =
            require_key(obj, "alpha_init", line_no).get<double>();
        table.config.iterations =
            require_key(obj, "iterations", line_no).get<int>();
        table.config.convergence_tol =
            require_key(obj, "convergence_tol", line_no).get<double>();
        table.source_digest =
            require_key(obj, "source_digest", line_no).get<std::string>();
        meta_seen = true;
        continue;
      }
      VideoScoreTable::Entry e;
      e.video_id = require_key(obj, "video_id", line_no).get<std::string>();
      e.curve.m_ref = require_key(obj, "m80", line_no).get<double>();
      e.curve.alpha = require_key(obj, "alpha", line_no).get<double>();
      e.curve.ref_lag = require_key(obj, "ref_lag", line_no).get<int>();
      e.curve.n_annotations =
          require_key(obj, "n", line_no).get<std::int64_t>();
      if (e.video_id.empty())
        throw SchemaError("line " + std::to_string(line_no) +
                          ": empty video_id");
      table.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!meta_seen) throw SchemaError("missing metadata line");
  std::sort(table.entries.begin(), table.entries.end(),
            [](const VideoScoreTable::Entry& a,
               const VideoScoreTable::Entry& b) {
              return a.video_id < b.video_id;
            });
  for (std::size_t i = 1; i < table.entries.size(); ++i)
    if (table.entries[i - 1].video_id == table.entries[i].video_id)
      throw SchemaError("duplicate video_id '" + table.entries[i].video_id +
                        "'");
  return table;
}

VideoScoreTable read_scores_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_scores(in);
  } catch (const SchemaError& e) {
    throw SchemaError(prefix_path(path, e.what()));
  }
}

std::string eval_report_json(const EvalReport& report) {
  json r2;
  std::vector<int> extrapolated;
  for (const auto& [lag, r2v] : report.r2_by_lag) {
    r2[std::to_string(lag)] = r2v;
    if (lag < kAnnotatedLagLo || lag > kAnnotatedLagHi)
      extrapolated.push_back(lag);
  }
  const json obj{{"format_version", kFormatVersion},
                 {"kind", "memdecay-eval"},
                 {"n_videos", report.n_videos},
                 {"rank_correlation", report.rank_correlation},
                 {"r2_by_lag", r2},
                 {"curve_mae", report.curve_mae},
                 {"curve_grid",
                  {{"lag_lo", kCurveGridLo},
                   {"lag_hi", kCurveGridHi},
                   {"n_samples", kCurveGridSamples}}},
                 {"lags_outside_annotated_range", extrapolated}};
  return obj.dump(2);
}

std::string consistency_report_json(const ConsistencyReport& report) {
  const json obj{{"format_version", kFormatVersion},
                 {"kind", "memdecay-consistency"},
                 {"seed", report.split_seed},
                 {"n_splits", report.per_split_rho.size()},
                 {"mean_rho", report.mean_rho},
                 {"per_split_rho", report.per_split_rho},
                 {"per_split_dropped", report.per_split_dropped}};
  return obj.dump(2);
}

void write_decile_table(std::ostream& out, const DecileTable& table) {
  out << "# format_version: " << kFormatVersion << "\n";
  out << "# kind: decile-curves\n";
  out << "# n_groups: " << table.n_groups << "\n";
  out << "# lag_bins: " << table.lag_bins << "\n";
  out << "# lag_range: [" << table.lag_min << ", " << table.lag_max << "]\n";
  out << "# ranking: score at reference lag ascending, ties by video_id\n";
  out << "group,lag_bin,lag_bin_center,mean_hit_rate,n\n";
  for (const DecileCell& c : table.cells) {
    out << c.group << ',' << c.lag_bin << ',' << format_double(c.lag_bin_center)
        << ',';
    if (c.mean_hit_rate) out << format_double(*c.mean_hit_rate);
    out << ',' << c.n << '\n';
  }
}

void write_trend_table(std::ostream& out, const TrendReport& report) {
  out << "# format_version: " << kFormatVersion << "\n";
  out << "# kind: lag-trend\n";
  out << "# r_linear: " << format_double(report.r_linear) << "\n";
  out << "# r_loglinear: " << format_double(report.r_loglinear) << "\n";
  out << "lag_bin_center,mean_hit_rate,n\n";
  for (const TrendBin& b : report.bins) {
    out << format_double(b.lag_bin_center) << ',';
    if (b.mean_hit_rate) out << format_double(*b.mean_hit_rate);
    out << ',' << b.n << '\n';
  }
}

}  // namespace memdecay
