#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "efc/data.hpp"
#include "efc/errors.hpp"
#include "efc/rng.hpp"

namespace efc {

namespace {

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2))); }

std::uint64_t hash_string(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) h = hash_combine(h, c);
  return hash_combine(h, s.size());
}

std::uint64_t bits_of(double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  return bits;
}

}  // namespace

int AttributeDescriptor::find_value(const std::string& value) const {
  auto it = std::find(values.begin(), values.end(), value);
  return it == values.end() ? -1 : static_cast<int>(it - values.begin());
}

AttributeDescriptor AttributeDescriptor::make_nominal(std::string name, std::vector<std::string> values) {
  AttributeDescriptor a;
  a.name = std::move(name);
  a.kind = AttributeKind::Nominal;
  a.values = std::move(values);
  return a;
}

AttributeDescriptor AttributeDescriptor::make_numeric(std::string name) {
  AttributeDescriptor a;
  a.name = std::move(name);
  a.kind = AttributeKind::Numeric;
  return a;
}

Dataset::Dataset(std::vector<AttributeDescriptor> attributes, AttributeDescriptor class_attr,
                 std::vector<double> values, std::vector<int> labels)
    : attributes_(std::move(attributes)),
      class_attr_(std::move(class_attr)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  for (int j = 0; j < cols(); ++j) attributes_[j].index = j;
  class_attr_.index = -1;
  if (values_.size() != static_cast<std::size_t>(rows()) * cols())
    throw DataError("dataset: value matrix size does not match rows x attributes");
  // observed ranges of numeric attributes
  for (int j = 0; j < cols(); ++j) {
    auto& a = attributes_[j];
    if (!a.numeric() || rows() == 0) continue;
    a.min = a.max = at(0, j);
    for (int i = 1; i < rows(); ++i) {
      a.min = std::min(a.min, at(i, j));
      a.max = std::max(a.max, at(i, j));
    }
  }
  validate();
}

void Dataset::validate() const {
  if (rows() < 1) throw DataError("dataset: no instances");
  if (cols() < 1) throw DataError("dataset: no attributes");
  if (!class_attr_.nominal() || class_attr_.values.empty())
    throw DataError("dataset: class attribute must be nominal with a non-empty domain");
  std::set<std::string> names;
  for (const auto& a : attributes_) {
    if (!names.insert(a.name).second) throw DataError("dataset: duplicate attribute name '" + a.name + "'");
    if (a.nominal()) {
      if (a.values.empty()) throw DataError("dataset: nominal attribute '" + a.name + "' has empty domain");
      std::set<std::string> seen(a.values.begin(), a.values.end());
      if (seen.size() != a.values.size())
        throw DataError("dataset: nominal attribute '" + a.name + "' has duplicate values");
    }
  }
  for (int i = 0; i < rows(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= class_count())
      throw DataError("dataset: label out of range at row " + std::to_string(i));
    for (int j = 0; j < cols(); ++j) {
      double v = at(i, j);
      if (!std::isfinite(v)) throw DataError("dataset: non-finite cell at row " + std::to_string(i));
      const auto& a = attributes_[j];
      if (a.nominal() && (v < 0 || v >= a.value_count() || v != std::floor(v)))
        throw DataError("dataset: nominal cell out of domain at row " + std::to_string(i) + ", attribute '" +
                        a.name + "'");
    }
  }
}

int Dataset::find_attribute(const std::string& name) const {
  for (int j = 0; j < cols(); ++j)
    if (attributes_[j].name == name) return j;
  return -1;
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(class_count(), 0);
  for (int y : labels_) ++counts[y];
  return counts;
}

Dataset Dataset::subset(std::span<const int> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * cols());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (int i : rows) {
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return Dataset(attributes_, class_attr_, std::move(values), std::move(labels));
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
  return Dataset(attributes_, class_attr_, values_, std::move(labels));
}

std::uint64_t Dataset::schema_fingerprint() const {
  std::uint64_t h = 0x1234;
  for (const auto& a : attributes_) {
    h = hash_string(h, a.name);
    h = hash_combine(h, static_cast<std::uint64_t>(a.kind));
    for (const auto& v : a.values) h = hash_string(h, v);
  }
  h = hash_string(h, class_attr_.name);
  for (const auto& v : class_attr_.values) h = hash_string(h, v);
  return h;
}

std::uint64_t Dataset::checksum(int ncols) const {
  std::uint64_t h = 0x5678;
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < ncols; ++j) h = hash_combine(h, bits_of(at(i, j)));
    h = hash_combine(h, static_cast<std::uint64_t>(labels_[i]));
  }
  return h;
}

std::string Dataset::cell_text(int i, int j) const {
  const auto& a = attributes_[j];
  if (a.nominal()) return a.values[static_cast<int>(at(i, j))];
  return format_real(at(i, j));
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows()) return false;
  for (int j = 0; j < a.cols(); ++j) {
    const auto& x = a.attributes_[j];
    const auto& y = b.attributes_[j];
    if (x.name != y.name || x.kind != y.kind || x.values != y.values) return false;
  }
  return a.class_attr_.name == b.class_attr_.name && a.class_attr_.values == b.class_attr_.values &&
         a.values_ == b.values_ && a.labels_ == b.labels_;
}

bool value_identical(const Dataset& a, const Dataset& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows()) return false;
  for (int j = 0; j < a.cols(); ++j)
    if (a.attribute(j).name != b.attribute(j).name || a.attribute(j).kind != b.attribute(j).kind) return false;
  for (int i = 0; i < a.rows(); ++i) {
    if (a.class_attr().values[a.label(i)] != b.class_attr().values[b.label(i)]) return false;
    for (int j = 0; j < a.cols(); ++j)
      if (a.cell_text(i, j) != b.cell_text(i, j)) return false;
  }
  return true;
}

// ---- Condition ----

Condition Condition::equals(int attr, int value) {
  Condition c;
  c.attr = attr;
  c.test = Test::Equals;
  c.value = value;
  return c;
}

Condition Condition::interval(int attr, double lower, double upper, bool lower_closed, bool upper_closed) {
  if (!(lower < upper)) throw ConfigError("condition: interval lower bound must be below upper bound");
  Condition c;
  c.attr = attr;
  c.test = Test::InInterval;
  c.lower = lower;
  c.upper = upper;
  c.lower_closed = lower_closed;
  c.upper_closed = upper_closed;
  return c;
}

bool Condition::holds(std::span<const double> row) const {
  double v = row[attr];
  if (test == Test::Equals) return static_cast<int>(v) == value;
  bool above = lower_closed ? v >= lower : v > lower;
  bool below = upper_closed ? v <= upper : v < upper;
  return above && below;
}

void Condition::check(const Dataset& ds) const {
  if (attr < 0 || attr >= ds.cols()) throw ConfigError("condition: unknown attribute index " + std::to_string(attr));
  const auto& a = ds.attribute(attr);
  if (test == Test::Equals) {
    if (!a.nominal()) throw ConfigError("condition: equality test on numeric attribute '" + a.name + "'");
    if (value < 0 || value >= a.value_count()) throw ConfigError("condition: value outside domain of '" + a.name + "'");
  } else {
    if (!a.numeric()) throw ConfigError("condition: interval test on nominal attribute '" + a.name + "'");
    if (!(lower < upper)) throw ConfigError("condition: empty interval on '" + a.name + "'");
  }
}

std::string Condition::render(const Dataset& ds) const {
  const auto& a = ds.attribute(attr);
  if (test == Test::Equals) return "(" + a.name + "=" + a.values[value] + ")";
  bool open_below = std::isinf(lower);
  bool open_above = std::isinf(upper);
  if (open_below && !open_above) return "(" + a.name + (upper_closed ? "<=" : "<") + format_real(upper) + ")";
  if (open_above && !open_below) return "(" + a.name + (lower_closed ? ">=" : ">") + format_real(lower) + ")";
  return "(" + a.name + " in " + (lower_closed ? "[" : "(") + format_real(lower) + "," + format_real(upper) +
         (upper_closed ? "]" : ")") + ")";
}

std::string Condition::key() const {
  if (test == Test::Equals) return "a" + std::to_string(attr) + "=" + std::to_string(value);
  return "a" + std::to_string(attr) + (lower_closed ? "[" : "(") + format_real(lower) + "," + format_real(upper) +
         (upper_closed ? "]" : ")");
}

// ---- discretisation ----

std::vector<double> equal_width_cuts(double min, double max, int bins) {
  if (bins < 2) throw ConfigError("discretize: bins must be >= 2");
  std::vector<double> cuts;
  if (!(max > min)) return cuts;
  double width = (max - min) / bins;
  for (int k = 1; k < bins; ++k) {
    double c = min + width * k;
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return cuts;
}

std::vector<double> discretize(const Dataset& ds, int attr, int bins) {
  if (attr < 0 || attr >= ds.cols()) throw ConfigError("discretize: unknown attribute index");
  const auto& a = ds.attribute(attr);
  if (!a.numeric()) throw ConfigError("discretize: attribute '" + a.name + "' is nominal");
  return equal_width_cuts(a.min, a.max, bins);
}

int bin_of(std::span<const double> cuts, double value) {
  // cells (c_{k-1}, c_k]: lower_bound finds the first cut >= value
  return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace efc
