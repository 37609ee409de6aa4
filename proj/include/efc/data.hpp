#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace efc {

enum class AttributeKind { Nominal, Numeric };

struct AttributeDescriptor {
  std::string name;
  int index = 0;
  AttributeKind kind = AttributeKind::Nominal;
  std::vector<std::string> values;  // nominal domain
  double min = 0.0;                 // numeric observed range
  double max = 0.0;

  bool nominal() const { return kind == AttributeKind::Nominal; }
  bool numeric() const { return kind == AttributeKind::Numeric; }
  int value_count() const { return static_cast<int>(values.size()); }
  /// Index of `value` in the nominal domain, or -1.
  int find_value(const std::string& value) const;

  static AttributeDescriptor make_nominal(std::string name, std::vector<std::string> values);
  static AttributeDescriptor make_numeric(std::string name);
};

/// Tabular data: n rows by m attributes plus a nominal class.
///
/// Cells are stored row-major as doubles; a nominal cell holds its value
/// index. Instances of this type are treated as immutable once built, which
/// makes them safe to share between threads.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<AttributeDescriptor> attributes, AttributeDescriptor class_attr,
          std::vector<double> values, std::vector<int> labels);

  int rows() const { return static_cast<int>(labels_.size()); }
  int cols() const { return static_cast<int>(attributes_.size()); }
  int class_count() const { return class_attr_.value_count(); }

  const std::vector<AttributeDescriptor>& attributes() const { return attributes_; }
  const AttributeDescriptor& attribute(int j) const { return attributes_[j]; }
  const AttributeDescriptor& class_attr() const { return class_attr_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int i) const { return labels_[i]; }
  const std::vector<double>& values() const { return values_; }

  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * cols() + j]; }
  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<std::size_t>(i) * cols(), static_cast<std::size_t>(cols())};
  }

  /// Attribute index by name, or -1.
  int find_attribute(const std::string& name) const;
  std::vector<int> class_counts() const;

  /// New dataset made of the given rows (in that order), same schema.
  Dataset subset(std::span<const int> rows) const;
  /// Same schema and cells with replaced labels.
  Dataset with_labels(std::vector<int> labels) const;

  /// Stable 64-bit hash of attribute names, kinds and domains.
  std::uint64_t schema_fingerprint() const;
  /// Hash over the cells of columns [0, cols) and the labels.
  std::uint64_t checksum(int cols) const;
  std::uint64_t checksum() const { return checksum(this->cols()); }

  /// Cell rendered as text (nominal value name or shortest round-trip real).
  std::string cell_text(int i, int j) const;

  /// Exact equality: schema, domains (in order), cells and labels.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  void validate() const;

  std::vector<AttributeDescriptor> attributes_;
  AttributeDescriptor class_attr_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

/// Same attribute names/kinds, and every cell and label renders to the same
/// text. Unlike operator==, nominal domain order may differ.
bool value_identical(const Dataset& a, const Dataset& b);

/// Atomic predicate over one attribute: equality on a nominal value or
/// membership in an interval of a numeric attribute.
struct Condition {
  enum class Test { Equals, InInterval };

  int attr = 0;
  Test test = Test::Equals;
  int value = 0;  // Equals
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_closed = false;
  bool upper_closed = true;

  static Condition equals(int attr, int value);
  /// Interval (lower, upper] by default.
  static Condition interval(int attr, double lower, double upper, bool lower_closed = false,
                            bool upper_closed = true);

  bool holds(std::span<const double> row) const;
  /// Throws ConfigError if the condition is inconsistent with the schema.
  void check(const Dataset& ds) const;
  /// "(A2=1)", "(A3 in (0.25,0.5])", "(A3<=0.25)", "(A3>0.75)".
  std::string render(const Dataset& ds) const;
  /// Schema-independent identity used for deduplication.
  std::string key() const;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// ---- ingestion / export ----

struct CsvOptions {
  /// Class column name; empty selects the last column.
  std::string class_column;
  /// Optional per-column kind; columns without a hint are numeric when every
  /// cell parses as a real number, nominal otherwise.
  std::map<std::string, AttributeKind> type_hints;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string format_csv(const Dataset& ds);

/// Type hints reproducing `ds`'s schema, for reloading an exported CSV.
std::map<std::string, AttributeKind> type_hints_of(const Dataset& ds);

/// `class_attribute` empty selects the last declared attribute.
Dataset load_arff(const std::filesystem::path& path, const std::string& class_attribute = {});
Dataset parse_arff(const std::string& text, const std::string& class_attribute = {});
void write_arff(const Dataset& ds, const std::filesystem::path& path,
                const std::string& relation = "efc");
std::string format_arff(const Dataset& ds, const std::string& relation = "efc");

/// Equal-width cut points over the observed range of a numeric attribute:
/// bins-1 strictly increasing reals, or none for a constant attribute.
std::vector<double> discretize(const Dataset& ds, int attr, int bins);
std::vector<double> equal_width_cuts(double min, double max, int bins);

/// Index of the cell of `value` among cuts (0..cuts.size()), cells (c_{k-1}, c_k].
int bin_of(std::span<const double> cuts, double value);

/// Shortest text that round-trips to the same double.
std::string format_real(double v);

}  // namespace efc
