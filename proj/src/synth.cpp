#include "efc/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <set>

#include "efc/errors.hpp"
#include "efc/rng.hpp"

namespace efc {

namespace {

enum class Domain { Binary, Ternary, Unit };

struct Generator {
  std::vector<std::string> names;
  std::vector<Domain> domains;
  int classes = 2;
  double noise = 0.0;
  std::vector<int> unrelated;
};

using Row = std::span<const double>;

int v(Row x, int one_based) { return static_cast<int>(x[one_based - 1]); }

std::vector<std::string> numbered(const std::string& prefix, int m) {
  std::vector<std::string> out;
  for (int k = 1; k <= m; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

Generator describe(const std::string& name) {
  Generator g;
  auto fill = [&](int m, Domain d) {
    g.names = numbered("A", m);
    g.domains.assign(m, d);
  };
  if (name == "LogicalConcB" || name == "LogicalConcBNoisy") {
    fill(7, Domain::Binary);
    g.noise = name == "LogicalConcB" ? 0 : 5;
    g.unrelated = {6};
  } else if (name == "BinClassDisAttr") {
    fill(5, Domain::Ternary);
    g.unrelated = {4};
  } else if (name == "BinClassNumBinAttr") {
    fill(5, Domain::Unit);
    g.domains[0] = g.domains[1] = Domain::Binary;
    g.unrelated = {4};
  } else if (name == "BinClassNumDisAttr") {
    fill(5, Domain::Unit);
    g.domains[0] = g.domains[1] = Domain::Ternary;
    g.unrelated = {4};
  } else if (name == "DisjunctN") {
    fill(5, Domain::Unit);
    g.unrelated = {3, 4};
  } else if (name == "MultiVClassDisAttr") {
    fill(5, Domain::Ternary);
    g.classes = 3;
    g.unrelated = {4};
  } else if (name == "Concept") {
    fill(5, Domain::Binary);
    g.unrelated = {4};
  } else if (name == "ModGroups") {
    g.names = {"I1", "I2", "R1", "R2"};
    g.domains.assign(4, Domain::Unit);
    g.classes = 3;
    g.noise = 10;
    g.unrelated = {2, 3};
  } else if (name == "CondInd") {
    g.names = {"I90", "I80", "I70", "I60", "R1", "R2", "R3", "R4"};
    g.domains.assign(8, Domain::Binary);
    g.unrelated = {4, 5, 6, 7};
  } else if (name == "Toy") {
    fill(6, Domain::Binary);
    g.unrelated = {5};
  } else if (name == "TicTacToe") {
    g.names = {"top-left", "top-middle", "top-right", "middle-left", "middle-middle",
               "middle-right", "bottom-left", "bottom-middle", "bottom-right"};
    g.domains.assign(9, Domain::Ternary);
  } else {
    throw ConfigError("synth: unknown dataset '" + name + "'");
  }
  return g;
}

constexpr std::array<double, 4> kCondIndAgreement{0.9, 0.8, 0.7, 0.6};

int cell_of(double u) { return std::min(2, static_cast<int>(u * 3.0)); }

int tic_tac_toe_truth(Row x);

}  // namespace

const std::vector<std::string>& synthetic_names() {
  static const std::vector<std::string> names{
      "LogicalConcB", "LogicalConcBNoisy", "BinClassDisAttr", "BinClassNumBinAttr",
      "BinClassNumDisAttr", "DisjunctN", "MultiVClassDisAttr", "Concept",
      "ModGroups", "CondInd", "Toy", "TicTacToe"};
  return names;
}

double default_noise_percent(const std::string& name) { return describe(name).noise; }

std::vector<int> unrelated_attributes(const std::string& name) { return describe(name).unrelated; }

int concept_truth(const std::string& name, Row x) {
  const auto g = describe(name);
  if (x.size() != g.names.size())
    throw ConfigError("synth: " + name + " expects " + std::to_string(g.names.size()) + " attributes");
  if (name == "LogicalConcB" || name == "LogicalConcBNoisy") {
    if (v(x, 2) == 0) return v(x, 1) == 1 && v(x, 3) == 0;
    return (v(x, 4) == 1 && v(x, 5) == 1) || v(x, 6) == 1;
  }
  if (name == "BinClassDisAttr") {
    if (v(x, 1) == 2) return v(x, 2) == 0 && v(x, 3) == 1;
    if (v(x, 1) == 1) return v(x, 4) == 2 || v(x, 3) == 2 || v(x, 2) != v(x, 1);
    return v(x, 4) == 0;
  }
  if (name == "BinClassNumBinAttr") {
    if (v(x, 1) == 0) return x[2] > 0.3 && x[3] < 0.1;
    return v(x, 2) == 0 && x[2] > 0.7;
  }
  if (name == "BinClassNumDisAttr") {
    if (v(x, 2) == 0) return x[2] < 0.5 && v(x, 1) == 0;
    if (v(x, 2) == 1) return x[3] > 0.15 && v(x, 1) == 2;
    return x[2] > 0.5 && x[3] > 0.5 && v(x, 1) == 1;
  }
  if (name == "DisjunctN") return x[0] > 0.5 || x[1] > 0.7 || x[2] < 0.4;
  if (name == "MultiVClassDisAttr") {
    if (v(x, 1) == 2) return v(x, 2) == 0 && v(x, 3) == 1 ? 1 : 0;
    if (v(x, 1) == 1) return v(x, 4) == 2 || v(x, 3) == 2 || v(x, 2) != v(x, 1) ? 2 : 1;
    return v(x, 4) == 0 ? 2 : 0;
  }
  if (name == "Concept") {
    if (v(x, 2) == 0) return v(x, 1) == 1 && v(x, 3) == 0 && v(x, 3) == v(x, 4);
    int count = (v(x, 3) == 1) + (v(x, 1) == v(x, 4));
    return count > 0;
  }
  if (name == "ModGroups") return ((cell_of(x[0]) - cell_of(x[1])) % 3 + 3) % 3;
  if (name == "CondInd") {
    double score = 0;
    for (std::size_t p = 0; p < kCondIndAgreement.size(); ++p) {
      double w = std::log(kCondIndAgreement[p] / (1 - kCondIndAgreement[p]));
      score += x[p] == 1 ? w : -w;
    }
    return score > 0;
  }
  if (name == "Toy") {
    if (v(x, 1) == 0) return v(x, 2) == 1 && v(x, 3) == 1;
    return v(x, 4) == 1 && v(x, 5) == 1;
  }
  return tic_tac_toe_truth(x);
}

Dataset generate(const SyntheticSpec& spec) {
  if (spec.name == "TicTacToe") return tic_tac_toe_endgames();
  const auto g = describe(spec.name);
  if (spec.n < 1) throw ConfigError("synth: n must be >= 1");
  const double noise = spec.noise_percent.value_or(g.noise);
  if (noise < 0 || noise > 100) throw ConfigError("synth: noise percent must lie in [0,100]");

  const int m = static_cast<int>(g.names.size());
  std::vector<AttributeDescriptor> attrs;
  for (int j = 0; j < m; ++j) {
    switch (g.domains[j]) {
      case Domain::Binary: attrs.push_back(AttributeDescriptor::make_nominal(g.names[j], {"0", "1"})); break;
      case Domain::Ternary: attrs.push_back(AttributeDescriptor::make_nominal(g.names[j], {"0", "1", "2"})); break;
      case Domain::Unit: attrs.push_back(AttributeDescriptor::make_numeric(g.names[j])); break;
    }
  }
  std::vector<std::string> class_values;
  for (int c = 0; c < g.classes; ++c) class_values.push_back(std::to_string(c));

  Rng rng(spec.seed);
  std::vector<double> values(static_cast<std::size_t>(spec.n) * m);
  std::vector<int> labels(spec.n);
  const bool generative = spec.name == "CondInd";
  for (int i = 0; i < spec.n; ++i) {
    double* row = values.data() + static_cast<std::size_t>(i) * m;
    int drawn_class = generative ? static_cast<int>(rng.below(2)) : 0;
    for (int j = 0; j < m; ++j) {
      if (generative && j < static_cast<int>(kCondIndAgreement.size())) {
        bool agree = rng.uniform() < kCondIndAgreement[j];
        row[j] = agree ? drawn_class : 1 - drawn_class;
        continue;
      }
      switch (g.domains[j]) {
        case Domain::Binary: row[j] = static_cast<double>(rng.below(2)); break;
        case Domain::Ternary: row[j] = static_cast<double>(rng.below(3)); break;
        case Domain::Unit: row[j] = rng.uniform(); break;
      }
    }
    labels[i] = generative ? drawn_class : concept_truth(spec.name, {row, static_cast<std::size_t>(m)});
  }

  const auto flips = static_cast<int>(std::llround(noise / 100.0 * spec.n));
  if (flips > 0) {
    std::vector<int> order(spec.n);
    for (int i = 0; i < spec.n; ++i) order[i] = i;
    rng.shuffle(std::span<int>(order));
    for (int k = 0; k < flips; ++k) {
      int i = order[k];
      int shift = 1 + static_cast<int>(rng.below(g.classes - 1));
      labels[i] = (labels[i] + shift) % g.classes;
    }
  }
  return Dataset(std::move(attrs), AttributeDescriptor::make_nominal("class", class_values), std::move(values),
                 std::move(labels));
}

// ---- tic-tac-toe ----

namespace {

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                              {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
// cell codes: 0 = x, 1 = o, 2 = b(lank)

bool wins(const std::array<int, 9>& b, int player) {
  for (const auto& line : kLines)
    if (b[line[0]] == player && b[line[1]] == player && b[line[2]] == player) return true;
  return false;
}

int tic_tac_toe_truth(Row x) {
  std::array<int, 9> b{};
  for (int k = 0; k < 9; ++k) b[k] = static_cast<int>(x[k]);
  return wins(b, 0) ? 1 : 0;
}

}  // namespace

Dataset tic_tac_toe_endgames() {
  std::set<std::array<int, 9>> finals;
  std::array<int, 9> board;
  board.fill(2);
  std::function<void(int)> play = [&](int player) {
    bool full = std::none_of(board.begin(), board.end(), [](int c) { return c == 2; });
    if (wins(board, 0) || wins(board, 1) || full) {
      finals.insert(board);
      return;
    }
    for (int k = 0; k < 9; ++k) {
      if (board[k] != 2) continue;
      board[k] = player;
      play(1 - player);
      board[k] = 2;
    }
  };
  play(0);

  const auto g = describe("TicTacToe");
  std::vector<AttributeDescriptor> attrs;
  for (const auto& n : g.names) attrs.push_back(AttributeDescriptor::make_nominal(n, {"x", "o", "b"}));
  std::vector<double> values;
  std::vector<int> labels;
  for (const auto& b : finals) {
    for (int c : b) values.push_back(c);
    labels.push_back(wins(b, 0) ? 1 : 0);
  }
  return Dataset(std::move(attrs), AttributeDescriptor::make_nominal("class", {"negative", "positive"}),
                 std::move(values), std::move(labels));
}

}  // namespace efc
