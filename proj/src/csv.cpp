#include <charconv>
#include <fstream>
#include <sstream>

#include "efc/data.hpp"
#include "efc/errors.hpp"
#include "io_util.hpp"

namespace efc {

namespace {

using Record = std::vector<std::string>;

// RFC-4180: quoted fields may contain separators, doubled quotes and newlines.
std::vector<Record> split_records(const std::string& text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = current.size() == 1 && current[0].empty();
    if (!blank) records.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) throw DataError("csv: stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !current.empty()) end_record();
  return records;
}

std::optional<double> parse_real(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return v;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
  auto records = split_records(text);
  if (records.empty()) throw DataError("csv: empty file");
  const Record& header = records.front();
  const std::size_t width = header.size();
  if (records.size() < 2) throw DataError("csv: no data rows");
  for (std::size_t r = 1; r < records.size(); ++r)
    if (records[r].size() != width)
      throw DataError("csv: ragged row " + std::to_string(r) + " (" + std::to_string(records[r].size()) +
                      " fields, expected " + std::to_string(width) + ")");

  std::size_t class_col = width - 1;
  if (!options.class_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.class_column);
    if (it == header.end()) throw DataError("csv: class column '" + options.class_column + "' missing");
    class_col = static_cast<std::size_t>(it - header.begin());
  }
  if (width < 2) throw DataError("csv: need at least one attribute and a class column");

  const std::size_t n = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r)
    for (const auto& cell : records[r])
      if (cell == "?" || cell.empty()) throw DataError("csv: missing value in row " + std::to_string(r));

  std::vector<AttributeDescriptor> attrs;
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == class_col) continue;
    const std::string& name = header[c];
    auto hint = options.type_hints.find(name);
    bool numeric;
    if (hint != options.type_hints.end()) {
      numeric = hint->second == AttributeKind::Numeric;
    } else {
      numeric = true;
      for (std::size_t r = 1; r <= n && numeric; ++r) numeric = parse_real(records[r][c]).has_value();
    }
    std::vector<double> col(n);
    if (numeric) {
      for (std::size_t r = 1; r <= n; ++r) {
        auto v = parse_real(records[r][c]);
        if (!v) throw DataError("csv: unparseable numeric cell '" + records[r][c] + "' in column '" + name + "'");
        col[r - 1] = *v;
      }
      attrs.push_back(AttributeDescriptor::make_numeric(name));
    } else {
      AttributeDescriptor a = AttributeDescriptor::make_nominal(name, {});
      for (std::size_t r = 1; r <= n; ++r) {
        int idx = a.find_value(records[r][c]);
        if (idx < 0) {
          idx = a.value_count();
          a.values.push_back(records[r][c]);
        }
        col[r - 1] = idx;
      }
      attrs.push_back(std::move(a));
    }
    columns.push_back(std::move(col));
  }

  AttributeDescriptor cls = AttributeDescriptor::make_nominal(header[class_col], {});
  std::vector<int> labels(n);
  for (std::size_t r = 1; r <= n; ++r) {
    int idx = cls.find_value(records[r][class_col]);
    if (idx < 0) {
      idx = cls.value_count();
      cls.values.push_back(records[r][class_col]);
    }
    labels[r - 1] = idx;
  }

  const std::size_t m = attrs.size();
  std::vector<double> values(n * m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) values[i * m + j] = columns[j][i];
  return Dataset(std::move(attrs), std::move(cls), std::move(values), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

std::string format_csv(const Dataset& ds) {
  std::ostringstream out;
  for (const auto& a : ds.attributes()) out << quote(a.name) << ',';
  out << quote(ds.class_attr().name) << '\n';
  for (int i = 0; i < ds.rows(); ++i) {
    for (int j = 0; j < ds.cols(); ++j) out << quote(ds.cell_text(i, j)) << ',';
    out << quote(ds.class_attr().values[ds.label(i)]) << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_csv(ds);
}

std::map<std::string, AttributeKind> type_hints_of(const Dataset& ds) {
  std::map<std::string, AttributeKind> hints;
  for (const auto& a : ds.attributes()) hints[a.name] = a.kind;
  return hints;
}

// shared with arff.cpp
std::string read_text_file(const std::filesystem::path& path) { return read_file(path); }

}  // namespace efc
