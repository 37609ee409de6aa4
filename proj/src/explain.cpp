#include "efc/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "efc/errors.hpp"
#include "io_util.hpp"

namespace efc {

void ExplainConfig::validate() const {
  if (max_to_explain < 1) throw ConfigError("explain: maxToExplain must be >= 1");
  if (!(inst_thr > 0 && inst_thr <= 1)) throw ConfigError("explain: instThr must lie in (0, 1]");
  if (samples < 1) throw ConfigError("explain: samples must be >= 1");
}

ExplanationSelection select_explanation_instances(const Dataset& ds, const ExplainConfig& cfg) {
  cfg.validate();
  const auto counts = ds.class_counts();
  const int C = ds.class_count();
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return counts[a] < counts[b]; });
  if (cfg.class_index) {
    int c = *cfg.class_index;
    if (c < 0 || c >= C) throw ConfigError("explain: class index out of range");
    order.erase(std::find(order.begin(), order.end(), c));
    order.insert(order.begin(), c);
  }
  const double bar = cfg.inst_thr * ds.rows();
  auto chosen = std::find_if(order.begin(), order.end(), [&](int c) { return counts[c] > 0 && counts[c] >= bar; });
  if (chosen == order.end()) throw DataError("explain: no class reaches the instThr support threshold");

  ExplanationSelection sel;
  sel.class_index = *chosen;
  for (int i = 0; i < ds.rows(); ++i)
    if (ds.label(i) == sel.class_index) sel.instances.push_back(i);
  if (static_cast<int>(sel.instances.size()) > cfg.max_to_explain) {
    Rng rng(derive_seed(cfg.seed, 0x5e1ec7ULL));
    rng.shuffle(std::span<int>(sel.instances));
    sel.instances.resize(cfg.max_to_explain);
    std::sort(sel.instances.begin(), sel.instances.end());
  }
  return sel;
}

std::vector<double> ime_explain(const Model& model, const Dataset& background, std::span<const double> x,
                                int class_index, int samples, Rng& rng) {
  const int m = static_cast<int>(x.size());
  const int n = background.rows();
  if (samples < 1) throw ConfigError("explain: samples must be >= 1");
  if (background.cols() != m) throw DataError("explain: instance does not match the background schema");
  if (class_index < 0 || class_index >= model.class_count()) throw ConfigError("explain: class index out of range");

  std::vector<double> phi(m, 0.0);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  // background rows are drawn in reshuffled passes
  std::vector<int> bg(n);
  std::iota(bg.begin(), bg.end(), 0);
  int cursor = n;
  std::vector<double> buf(m);

  // memo of model outputs for nominal-only schemas
  bool memo = std::all_of(background.attributes().begin(), background.attributes().end(),
                          [](const AttributeDescriptor& a) { return a.nominal() && a.value_count() < 256; });
  std::unordered_map<std::string, double> cache;
  std::string key(memo ? m : 0, '\0');
  auto f = [&]() {
    if (!memo) return model.class_probability(buf, class_index);
    for (int j = 0; j < m; ++j) key[j] = static_cast<char>(static_cast<int>(buf[j]));
    auto [it, fresh] = cache.try_emplace(key, 0.0);
    if (fresh) it->second = model.class_probability(buf, class_index);
    return it->second;
  };

  std::span<const double> z;
  for (int s = 0; s < samples; ++s) {
    if (s % 2 == 1) {
      std::reverse(perm.begin(), perm.end());
    } else {
      if (cursor == n) {
        rng.shuffle(std::span<int>(bg));
        cursor = 0;
      }
      z = background.row(bg[cursor++]);
      rng.shuffle(std::span<int>(perm));
    }
    std::copy(z.begin(), z.end(), buf.begin());
    double prev = f();
    for (int k = 0; k < m; ++k) {
      int j = perm[k];
      if (buf[j] == x[j]) continue;
      buf[j] = x[j];
      double cur = f();
      phi[j] += cur - prev;
      prev = cur;
    }
  }
  for (double& v : phi) v /= samples;
  return phi;
}

std::vector<double> ime_explain(const Model& model, const Dataset& ds, int instance, int class_index, int samples,
                                std::uint64_t seed) {
  model.check_schema(ds);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(instance)));
  return ime_explain(model, ds, ds.row(instance), class_index, samples, rng);
}

ExplanationMatrix get_explanations(const Dataset& ds, const Model& model, const ExplanationSelection& selection,
                                   const ExplainConfig& cfg, Execution exec) {
  cfg.validate();
  model.check_schema(ds);
  if (selection.instances.empty()) throw ConfigError("explain: no instances to explain");
  ExplanationMatrix e;
  e.rows = static_cast<int>(selection.instances.size());
  e.cols = ds.cols();
  e.values.assign(static_cast<std::size_t>(e.rows) * e.cols, 0.0);
  for (const auto& a : ds.attributes()) e.attribute_names.push_back(a.name);
  e.instances = selection.instances;
  e.class_index = selection.class_index;
  e.samples = cfg.samples;
  e.seed = cfg.seed;

  auto one = [&](int i) {
    auto phi = ime_explain(model, ds, selection.instances[i], selection.class_index, cfg.samples, cfg.seed);
    std::copy(phi.begin(), phi.end(), e.values.begin() + static_cast<std::size_t>(i) * e.cols);
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < e.rows; ++i) one(i);
  } else {
    for (int i = 0; i < e.rows; ++i) one(i);
  }
  return e;
}

std::string format_explanations_csv(const ExplanationMatrix& e) {
  std::ostringstream out;
  for (int j = 0; j < e.cols; ++j) out << (j ? "," : "") << e.attribute_names[j];
  out << '\n';
  for (int i = 0; i < e.rows; ++i) {
    for (int j = 0; j < e.cols; ++j) out << (j ? "," : "") << format_real(e.at(i, j));
    out << '\n';
  }
  return out.str();
}

void write_explanations_csv(const ExplanationMatrix& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_explanations_csv(e);
}

ExplanationMatrix parse_explanations_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ExplanationMatrix e;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      out.push_back(cell);
    }
    return out;
  };
  if (!std::getline(in, line)) throw DataError("explanations: empty file");
  e.attribute_names = split(line);
  e.cols = static_cast<int>(e.attribute_names.size());
  if (e.cols == 0) throw DataError("explanations: missing header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    auto cells = split(line);
    if (static_cast<int>(cells.size()) != e.cols)
      throw DataError("explanations: line " + std::to_string(line_no) + " has the wrong number of values");
    for (const auto& c : cells) {
      double v;
      try {
        std::size_t used = 0;
        v = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw DataError("explanations: unparseable value '" + c + "' on line " + std::to_string(line_no));
      }
      if (!std::isfinite(v)) throw DataError("explanations: non-finite value on line " + std::to_string(line_no));
      e.values.push_back(v);
    }
    ++e.rows;
  }
  return e;
}

ExplanationMatrix read_explanations_csv(const std::filesystem::path& path) {
  return parse_explanations_csv(read_text_file(path));
}

}  // namespace efc
