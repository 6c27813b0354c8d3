#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/graph.hpp"

/// Interaction ingestion and time-frame slicing.
namespace evochain::tempnet {

struct Interaction {
  std::string source;
  std::string target;
  std::int64_t timestamp = 0;
  double weight = 1.0;

  bool operator==(const Interaction&) const = default;
};

/// Immutable, timestamp-ordered interaction records. Safe to share across
/// threads once constructed.
class InteractionLog {
 public:
  InteractionLog() = default;
  /// Stable-sorts by timestamp. Throws ParameterError on a negative weight.
  explicit InteractionLog(std::vector<Interaction> records);

  std::span<const Interaction> records() const noexcept { return records_; }
  /// Records with timestamp in [start, end).
  std::span<const Interaction> between(std::int64_t start, std::int64_t end) const;

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

 private:
  std::vector<Interaction> records_;
};

struct CsvOptions {
  char delimiter = ',';
};

/// Reads `source,target,timestamp[,weight]` CSV with a mandatory header.
/// Accepts LF or CRLF line endings and skips blank lines. Errors carry the
/// 1-based line number (the header is line 1).
InteractionLog parse_interactions(std::istream& in, const CsvOptions& options = {});
InteractionLog parse_interactions(std::string_view text, const CsvOptions& options = {});
void write_interactions(std::ostream& out, const InteractionLog& log);

/// Frame geometry. Overlap between consecutive frames is
/// `window_length - step`.
struct WindowSpec {
  std::int64_t span_start = 0;
  std::int64_t span_end = 0;
  std::int64_t window_length = 0;
  std::int64_t step = 0;

  void validate() const;
};

/// Half-open interval [start, end).
struct TimeFrame {
  std::size_t index = 0;
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool operator==(const TimeFrame&) const = default;
};

/// Frames start at span_start + k * step and are emitted while they fit
/// entirely inside the span; trailing partial windows are dropped.
std::vector<TimeFrame> slice_windows(const WindowSpec& spec);

struct Snapshot {
  TimeFrame frame;
  SnapshotGraph graph;

  bool operator==(const Snapshot&) const = default;
};

/// Sums the weights of in-frame interactions per ordered pair. With
/// `directed == false` every interaction contributes both directions.
Snapshot build_snapshot(const TimeFrame& frame, const InteractionLog& log, bool directed);

/// One JSON object per line:
/// {"frame_index":n,"start":s,"end":e,"arcs":[[src,dst,w],...]}
/// with arcs sorted by (src, dst).
void write_snapshot(std::ostream& out, const Snapshot& snapshot);
Snapshot parse_snapshot(std::string_view line);
std::vector<Snapshot> read_snapshots(std::istream& in);

}  // namespace evochain::tempnet
