#include "evochain/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "evochain/error.hpp"
#include "evochain/random.hpp"
#include "format.hpp"
#include "json.hpp"

namespace evochain {

using nlohmann::json;

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::size_t index_of(const std::vector<std::string>& values, const std::string& value,
                     std::size_t line_no, const char* what) {
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) throw ParseError(line_no, std::string("unknown ") + what + " '" + value + "'");
  return static_cast<std::size_t>(it - values.begin());
}

}  // namespace

std::size_t Dataset::numeric_count() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(), [](const FeatureInfo& f) {
    return f.kind == FeatureKind::numeric;
  }));
}

std::size_t Dataset::categorical_count() const { return feature_count() - numeric_count(); }

void Dataset::validate() const {
  if (labels.size() != rows.size()) throw IntegrityError("dataset has one label per row");
  if (!std::is_sorted(classes.begin(), classes.end()) ||
      std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    throw IntegrityError("dataset classes must be sorted and distinct");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != features.size()) {
      throw IntegrityError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                           " values, schema has " + std::to_string(features.size()));
    }
    if (labels[r] >= classes.size()) throw IntegrityError("row " + std::to_string(r) + " has an unknown label");
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (!std::isfinite(row[f])) {
        throw IntegrityError("missing or non-finite value in row " + std::to_string(r) + ", feature " +
                             features[f].name);
      }
      if (features[f].kind == FeatureKind::categorical) {
        const double v = row[f];
        if (v < 0 || v != std::floor(v) || v >= static_cast<double>(features[f].categories.size())) {
          throw IntegrityError("category out of range in row " + std::to_string(r) + ", feature " +
                               features[f].name);
        }
      }
    }
  }
}

std::string Dataset::fingerprint() const {
  std::string text;
  for (const auto& f : features) {
    text += f.name;
    text += f.kind == FeatureKind::numeric ? "|n" : "|c";
    for (const auto& c : f.categories) text += "|" + c;
    text += '\n';
  }
  text += "classes";
  for (const auto& c : classes) text += "|" + c;
  return to_hex(fnv1a64(text));
}

void MinMaxScaler::fit(const Dataset& data, std::span<const std::size_t> rows) {
  const std::size_t width = data.feature_count();
  numeric_.assign(width, false);
  min_.assign(width, 0.0);
  max_.assign(width, 0.0);
  for (std::size_t f = 0; f < width; ++f) numeric_[f] = data.features[f].kind == FeatureKind::numeric;
  bool first = true;
  auto visit = [&](std::size_t r) {
    const auto& row = data.rows[r];
    for (std::size_t f = 0; f < width; ++f) {
      if (first) {
        min_[f] = max_[f] = row[f];
      } else {
        min_[f] = std::min(min_[f], row[f]);
        max_[f] = std::max(max_[f], row[f]);
      }
    }
    first = false;
  };
  if (rows.empty()) {
    for (std::size_t r = 0; r < data.size(); ++r) visit(r);
  } else {
    for (std::size_t r : rows) visit(r);
  }
}

void MinMaxScaler::transform(std::vector<double>& row) const {
  if (row.size() != numeric_.size()) throw IntegrityError("row width does not match the fitted scaler");
  for (std::size_t f = 0; f < row.size(); ++f) {
    if (!numeric_[f]) continue;
    const double range = max_[f] - min_[f];
    row[f] = range > 0.0 ? (row[f] - min_[f]) / range : 0.0;
  }
}

void MinMaxScaler::transform(Dataset& data) const {
  for (auto& row : data.rows) transform(row);
}

Dataset normalize(const Dataset& data) {
  MinMaxScaler scaler;
  scaler.fit(data);
  Dataset out = data;
  scaler.transform(out);
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (const auto& f : data.features) out << f.name << ',';
  out << "target\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& row = data.rows[r];
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (data.features[f].kind == FeatureKind::categorical) {
        out << quote(data.features[f].categories[static_cast<std::size_t>(row[f])]);
      } else {
        out << detail::format_number(row[f]);
      }
      out << ',';
    }
    out << quote(data.classes[data.labels[r]]) << '\n';
  }
}

void write_schema(std::ostream& out, const Dataset& data) {
  json features = json::array();
  for (const auto& f : data.features) {
    json entry = {{"name", f.name},
                  {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"},
                  {"age", f.age}};
    if (f.kind == FeatureKind::categorical) entry["categories"] = f.categories;
    features.push_back(std::move(entry));
  }
  json schema = {{"features", features}, {"classes", data.classes}, {"fingerprint", data.fingerprint()}};
  out << schema.dump(2) << '\n';
}

Dataset read_dataset(std::istream& csv, std::istream& schema_in) {
  Dataset data;
  try {
    json schema = json::parse(schema_in, nullptr, true, true);
    for (const auto& entry : schema.at("features")) {
      FeatureInfo f;
      f.name = entry.at("name").get<std::string>();
      const auto kind = entry.at("kind").get<std::string>();
      if (kind == "categorical") {
        f.kind = FeatureKind::categorical;
        f.categories = entry.at("categories").get<std::vector<std::string>>();
      } else if (kind != "numeric") {
        throw ParseError(0, "unknown feature kind '" + kind + "'");
      }
      f.age = entry.at("age").get<std::size_t>();
      data.features.push_back(std::move(f));
    }
    data.classes = schema.at("classes").get<std::vector<std::string>>();
    if (schema.contains("fingerprint") && schema["fingerprint"].get<std::string>() != data.fingerprint()) {
      throw IntegrityError("schema fingerprint does not match its contents");
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed dataset schema: ") + e.what());
  }

  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(csv, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto fields = detail::split_fields(line, ',', line_no);
    if (fields.size() != data.features.size() + 1) {
      throw ParseError(line_no, "expected " + std::to_string(data.features.size() + 1) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    if (header) {
      for (std::size_t f = 0; f < data.features.size(); ++f) {
        if (fields[f] != data.features[f].name) {
          throw IntegrityError("CSV column '" + fields[f] + "' does not match schema feature '" +
                               data.features[f].name + "'");
        }
      }
      header = false;
      continue;
    }
    std::vector<double> row(data.features.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
      const auto& info = data.features[f];
      if (info.kind == FeatureKind::categorical) {
        row[f] = static_cast<double>(index_of(info.categories, fields[f], line_no, "category"));
        continue;
      }
      const std::string& text = fields[f];
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), row[f]);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(line_no, "invalid number '" + text + "' in column " + info.name);
      }
    }
    data.labels.push_back(index_of(data.classes, fields.back(), line_no, "class"));
    data.rows.push_back(std::move(row));
  }
  data.validate();
  return data;
}

}  // namespace evochain
