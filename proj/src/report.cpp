#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "efc/errors.hpp"
#include "efc/pipeline.hpp"

namespace efc {

std::vector<BenchmarkRow> benchmark_report(const std::vector<BenchmarkSpec>& specs, const CvConfig& base,
                                           const std::filesystem::path& path) {
  std::vector<BenchmarkRow> rows;
  for (const auto& spec : specs) {
    for (ClassifierKind clf : spec.classifiers) {
      for (ConstructMode mode : spec.modes) {
        CvConfig cfg = base;
        cfg.mode = mode;
        CvResult r = cross_validate(spec.data, clf, cfg);
        BenchmarkRow row;
        row.dataset = spec.dataset;
        row.classifier = classifier_name(clf);
        row.mode = construct_mode_name(mode);
        row.accuracy = r.mean;
        row.stddev = r.stddev;
        row.elapsed_ms = r.elapsed_ms;
        double total = std::accumulate(r.fold_feature_count.begin(), r.fold_feature_count.end(), 0.0);
        row.features = total / r.fold_feature_count.size();
        rows.push_back(row);
      }
    }
  }
  if (!path.empty()) {
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw DataError("cannot write " + path.string());
    csv << "dataset,classifier,mode,accuracy,stddev,features,elapsed_ms\n";
    for (const auto& r : rows)
      csv << r.dataset << ',' << r.classifier << ',' << r.mode << ',' << format_real(r.accuracy) << ','
          << format_real(r.stddev) << ',' << format_real(r.features) << ',' << format_real(r.elapsed_ms) << '\n';
    std::ofstream txt(path.string() + ".txt", std::ios::binary);
    txt << format_benchmark_table(rows);
  }
  return rows;
}

std::string format_benchmark_table(const std::vector<BenchmarkRow>& rows) {
  std::size_t w = 7;
  for (const auto& r : rows) w = std::max(w, r.dataset.size());
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s  %-4s  %-5s  %8s  %6s  %8s  %10s\n", static_cast<int>(w), "dataset", "clf",
                "mode", "CA", "sd", "features", "ms");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-4s  %-5s  %8.2f  %6.2f  %8.1f  %10.1f\n", static_cast<int>(w),
                  r.dataset.c_str(), r.classifier.c_str(), r.mode.c_str(), r.accuracy, r.stddev, r.features,
                  r.elapsed_ms);
    out << buf;
  }
  return out.str();
}

}  // namespace efc
