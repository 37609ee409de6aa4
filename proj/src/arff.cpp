#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "efc/data.hpp"
#include "efc/errors.hpp"
#include "io_util.hpp"

namespace efc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Splits on commas outside quotes; strips quotes and backslash escapes.
std::vector<std::string> split_values(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  char quote = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == '\\' && i + 1 < line.size()) {
        field += line[++i];
      } else if (c == quote) {
        quote = 0;
      } else {
        field += c;
      }
    } else if ((c == '\'' || c == '"') && trim(field).empty()) {
      quote = c;
      quoted = true;
      field.clear();
    } else if (c == ',') {
      out.push_back(quoted ? field : trim(field));
      field.clear();
      quoted = false;
    } else if (!(quoted && (c == ' ' || c == '\t'))) {
      field += c;
    }
  }
  out.push_back(quoted ? field : trim(field));
  return out;
}

// "@attribute name type" where name may be quoted.
std::pair<std::string, std::string> split_declaration(const std::string& rest) {
  std::string r = trim(rest);
  if (r.empty()) throw DataError("arff: empty @attribute declaration");
  std::size_t end;
  std::string name;
  if (r[0] == '\'' || r[0] == '"') {
    end = r.find(r[0], 1);
    if (end == std::string::npos) throw DataError("arff: unterminated attribute name");
    name = r.substr(1, end - 1);
    ++end;
  } else {
    end = r.find_first_of(" \t{");
    if (end == std::string::npos) throw DataError("arff: attribute '" + r + "' has no type");
    name = r.substr(0, end);
  }
  return {name, trim(r.substr(end))};
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(" ,{}'\"%\t") == std::string::npos && !s.empty()) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

}  // namespace

Dataset parse_arff(const std::string& text, const std::string& class_attribute) {
  std::istringstream in(text);
  std::string line;
  std::vector<AttributeDescriptor> declared;
  bool in_data = false;
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data) {
      std::string head = lower(t.substr(0, t.find_first_of(" \t")));
      if (head == "@relation") continue;
      if (head == "@data") {
        in_data = true;
        continue;
      }
      if (head != "@attribute") throw DataError("arff: unexpected header line " + std::to_string(line_no));
      auto [name, type] = split_declaration(t.substr(head.size()));
      if (!type.empty() && type[0] == '{') {
        std::size_t close = type.rfind('}');
        if (close == std::string::npos) throw DataError("arff: unterminated nominal domain for '" + name + "'");
        auto values = split_values(type.substr(1, close - 1));
        declared.push_back(AttributeDescriptor::make_nominal(name, values));
      } else {
        std::string ty = lower(type);
        if (ty == "numeric" || ty == "real" || ty == "integer")
          declared.push_back(AttributeDescriptor::make_numeric(name));
        else
          throw DataError("arff: unknown attribute type '" + type + "' for '" + name + "'");
      }
      continue;
    }
    auto fields = split_values(t);
    if (fields.size() != declared.size())
      throw DataError("arff: data line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " values, expected " + std::to_string(declared.size()));
    rows.push_back(std::move(fields));
  }
  if (declared.size() < 2) throw DataError("arff: need at least one attribute and a class");
  if (rows.empty()) throw DataError("arff: no data");

  std::size_t class_col = declared.size() - 1;
  if (!class_attribute.empty()) {
    auto it = std::find_if(declared.begin(), declared.end(),
                           [&](const AttributeDescriptor& a) { return a.name == class_attribute; });
    if (it == declared.end()) throw DataError("arff: class attribute '" + class_attribute + "' missing");
    class_col = static_cast<std::size_t>(it - declared.begin());
  }
  if (!declared[class_col].nominal()) throw DataError("arff: class attribute must be nominal");

  std::vector<AttributeDescriptor> attrs;
  for (std::size_t c = 0; c < declared.size(); ++c)
    if (c != class_col) attrs.push_back(declared[c]);
  const std::size_t m = attrs.size();
  std::vector<double> values;
  values.reserve(rows.size() * m);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < declared.size(); ++c) {
      const std::string& cell = rows[r][c];
      const auto& a = declared[c];
      if (cell == "?") throw DataError("arff: missing value in data row " + std::to_string(r + 1));
      double v;
      if (a.nominal()) {
        int idx = a.find_value(cell);
        if (idx < 0)
          throw DataError("arff: value '" + cell + "' outside declared domain of '" + a.name + "' (data row " +
                          std::to_string(r + 1) + ")");
        v = idx;
      } else {
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
          throw DataError("arff: unparseable numeric value '" + cell + "' for '" + a.name + "'");
      }
      if (c == class_col)
        labels.push_back(static_cast<int>(v));
      else
        values.push_back(v);
    }
  }
  return Dataset(std::move(attrs), declared[class_col], std::move(values), std::move(labels));
}

Dataset load_arff(const std::filesystem::path& path, const std::string& class_attribute) {
  return parse_arff(read_text_file(path), class_attribute);
}

std::string format_arff(const Dataset& ds, const std::string& relation) {
  std::ostringstream out;
  out << "@relation " << quote_if_needed(relation) << "\n\n";
  auto declare = [&](const AttributeDescriptor& a) {
    out << "@attribute " << quote_if_needed(a.name) << ' ';
    if (a.numeric()) {
      out << "numeric\n";
      return;
    }
    out << '{';
    for (int k = 0; k < a.value_count(); ++k) out << (k ? "," : "") << quote_if_needed(a.values[k]);
    out << "}\n";
  };
  for (const auto& a : ds.attributes()) declare(a);
  declare(ds.class_attr());
  out << "\n@data\n";
  for (int i = 0; i < ds.rows(); ++i) {
    for (int j = 0; j < ds.cols(); ++j) out << quote_if_needed(ds.cell_text(i, j)) << ',';
    out << quote_if_needed(ds.class_attr().values[ds.label(i)]) << '\n';
  }
  return out.str();
}

void write_arff(const Dataset& ds, const std::filesystem::path& path, const std::string& relation) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_arff(ds, relation);
}

}  // namespace efc
