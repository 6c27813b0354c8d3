#include "evochain/tempnet.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::tempnet {

using nlohmann::json;

InteractionLog::InteractionLog(std::vector<Interaction> records) : records_(std::move(records)) {
  for (const auto& record : records_) {
    if (!(record.weight >= 0.0)) throw ParameterError("interaction weight must be non-negative");
  }
  std::stable_sort(records_.begin(), records_.end(),
                   [](const Interaction& a, const Interaction& b) { return a.timestamp < b.timestamp; });
}

std::span<const Interaction> InteractionLog::between(std::int64_t start, std::int64_t end) const {
  auto by_time = [](const Interaction& record, std::int64_t t) { return record.timestamp < t; };
  auto first = std::lower_bound(records_.begin(), records_.end(), start, by_time);
  auto last = std::lower_bound(first, records_.end(), end, by_time);
  return {first, last};
}

namespace {

std::int64_t parse_timestamp(std::string_view text, std::size_t line_no) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(line_no, "invalid timestamp '" + std::string(text) + "'");
  }
  return value;
}

double parse_weight(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(line_no, "invalid weight '" + std::string(text) + "'");
  }
  if (!(value >= 0.0)) throw ParseError(line_no, "negative weight rejected");
  return value;
}

}  // namespace

InteractionLog parse_interactions(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::vector<Interaction> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line, options.delimiter, line_no);
    if (columns == 0) {
      const bool base = fields.size() >= 3 && fields[0] == "source" && fields[1] == "target" &&
                        fields[2] == "timestamp";
      const bool weighted = fields.size() == 4 && fields[3] == "weight";
      if (!base || (fields.size() != 3 && !weighted)) {
        throw ParseError(line_no, "expected header 'source,target,timestamp[,weight]'");
      }
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node id");
    Interaction record;
    record.source = std::move(fields[0]);
    record.target = std::move(fields[1]);
    record.timestamp = parse_timestamp(fields[2], line_no);
    if (columns == 4) record.weight = parse_weight(fields[3], line_no);
    records.push_back(std::move(record));
  }
  if (columns == 0) throw ParseError(line_no, "missing header");
  return InteractionLog(std::move(records));
}

InteractionLog parse_interactions(std::string_view text, const CsvOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_interactions(in, options);
}

namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

void write_interactions(std::ostream& out, const InteractionLog& log) {
  out << "source,target,timestamp,weight\n";
  for (const auto& record : log.records()) {
    out << quote_if_needed(record.source) << ',' << quote_if_needed(record.target) << ','
        << record.timestamp << ',' << json(record.weight).dump() << '\n';
  }
}

void WindowSpec::validate() const {
  if (window_length <= 0) throw ParameterError("window length must be positive");
  if (step <= 0 || step > window_length) {
    throw ParameterError("window step must satisfy 0 < step <= window length");
  }
  if (span_end - span_start < window_length) throw ParameterError("no complete window in span");
}

std::vector<TimeFrame> slice_windows(const WindowSpec& spec) {
  spec.validate();
  std::vector<TimeFrame> frames;
  for (std::int64_t start = spec.span_start; start + spec.window_length <= spec.span_end;
       start += spec.step) {
    frames.push_back({frames.size(), start, start + spec.window_length});
  }
  return frames;
}

Snapshot build_snapshot(const TimeFrame& frame, const InteractionLog& log, bool directed) {
  GraphBuilder builder;
  for (const auto& record : log.between(frame.start, frame.end)) {
    builder.add_arc(record.source, record.target, record.weight);
    if (!directed) builder.add_arc(record.target, record.source, record.weight);
  }
  return {frame, builder.build()};
}

void write_snapshot(std::ostream& out, const Snapshot& snapshot) {
  json arcs = json::array();
  const auto& graph = snapshot.graph;
  for (const Arc& arc : graph.arcs()) {
    arcs.push_back(json::array({graph.node_name(arc.source), graph.node_name(arc.target), arc.weight}));
  }
  json object = {{"frame_index", snapshot.frame.index},
                 {"start", snapshot.frame.start},
                 {"end", snapshot.frame.end},
                 {"arcs", std::move(arcs)}};
  out << object.dump() << '\n';
}

Snapshot parse_snapshot(std::string_view line) {
  try {
    json object = json::parse(line);
    Snapshot snapshot;
    snapshot.frame.index = object.at("frame_index").get<std::size_t>();
    snapshot.frame.start = object.at("start").get<std::int64_t>();
    snapshot.frame.end = object.at("end").get<std::int64_t>();
    GraphBuilder builder;
    for (const auto& arc : object.at("arcs")) {
      builder.add_arc(arc.at(0).get<std::string>(), arc.at(1).get<std::string>(), arc.at(2).get<double>());
    }
    snapshot.graph = builder.build();
    return snapshot;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed snapshot record: ") + e.what());
  }
}

std::vector<Snapshot> read_snapshots(std::istream& in) {
  std::vector<Snapshot> snapshots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    try {
      snapshots.push_back(parse_snapshot(line));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return snapshots;
}

}  // namespace evochain::tempnet
