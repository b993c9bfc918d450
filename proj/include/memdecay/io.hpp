#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memdecay/analysis.hpp"
#include "memdecay/core.hpp"
#include "memdecay/metrics.hpp"

namespace memdecay {

inline constexpr int kFormatVersion = 1;

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Column names holding each record field in an annotation CSV; override to
// ingest exports that use different headers.
struct ColumnMap {
  std::string video_id = "video_id";
  std::string participant_id = "participant_id";
  std::string lag = "lag";
  std::string response = "response";
};

// Annotation CSV: optional '#' comment lines, a header naming at least the
// four mapped columns, then one record per line. Extra columns are ignored.
// Malformed rows raise SchemaError, out-of-domain values ValueError; both
// carry the 1-based physical line number.
std::vector<AnnotationRecord> read_annotations(std::istream& in,
                                               const ColumnMap& columns = {});
std::vector<AnnotationRecord> read_annotations_file(
    const std::string& path, const ColumnMap& columns = {});
void write_annotations(std::ostream& out,
                       std::span<const AnnotationRecord> records);

struct IngestSummary {
  std::int64_t n_records = 0;
  std::int64_t n_videos = 0;
  std::int64_t n_participants = 0;
  int lag_min = 0;
  int lag_max = 0;
};
IngestSummary summarize_annotations(std::span<const AnnotationRecord> records);

std::string fnv1a_hex(std::string_view bytes);
// Whole file as bytes; throws IoError.
std::string read_file_bytes(const std::string& path);

// Score file: JSON lines. The first line is a metadata object carrying the
// format version, the fit configuration and the source digest; each further
// line is one video's curve. Doubles are written shortest-round-trip, so
// write -> read -> write is byte-stable.
void write_scores(std::ostream& out, const VideoScoreTable& table);
VideoScoreTable read_scores(std::istream& in);
VideoScoreTable read_scores_file(const std::string& path);

// Single pretty-printed JSON object per report.
std::string eval_report_json(const EvalReport& report);
std::string consistency_report_json(const ConsistencyReport& report);

// Plot-ready CSV tables with '#' metadata comments. Empty cells keep their
// row with an empty mean field.
void write_decile_table(std::ostream& out, const DecileTable& table);
void write_trend_table(std::ostream& out, const TrendReport& report);

}  // namespace memdecay
