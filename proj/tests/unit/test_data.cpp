#include <filesystem>
#include <set>

#include "doctest.h"
#include "efc/construct.hpp"
#include "efc/data.hpp"
#include "efc/errors.hpp"
#include "efc/synth.hpp"
#include "support/oracles.hpp"

using namespace efc;

TEST_CASE("csv: three rows, numeric and nominal columns") {
  auto ds = parse_csv("a,b,class\n1,x,0\n2.5,y,1\n3,x,0\n");
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 2);
  CHECK(ds.attribute(0).numeric());
  CHECK(ds.attribute(1).nominal());
  CHECK(ds.attribute(1).values == std::vector<std::string>{"x", "y"});
  CHECK(ds.class_attr().values == std::vector<std::string>{"0", "1"});
  CHECK(ds.at(1, 0) == 2.5);
  CHECK(ds.label(1) == 1);
  CHECK(ds.attribute(0).min == 1);
  CHECK(ds.attribute(0).max == 3);
}

TEST_CASE("csv: quoting and an explicit class column") {
  auto ds = parse_csv("\"y\",\"a,b\",x\n\"p\"\"q\",1,r\ns,2,t\n", {.class_column = "y"});
  CHECK(ds.cols() == 2);
  CHECK(ds.attribute(0).name == "a,b");
  CHECK(ds.class_attr().values == std::vector<std::string>{"p\"q", "s"});
}

TEST_CASE("csv: errors") {
  CsvOptions hint;
  hint.type_hints["a"] = AttributeKind::Numeric;
  CHECK_THROWS_AS(parse_csv("a,class\n1,0\nz,1\n", hint), DataError);
  CHECK_THROWS_AS(parse_csv("a,class\n1,0\n?,1\n"), DataError);
  CHECK_THROWS_AS(parse_csv("a,b,class\n1,2,0\n1,0\n"), DataError);
  CHECK_THROWS_AS(parse_csv(""), DataError);
  CHECK_THROWS_AS(parse_csv("a,class\n1,0\n", {.class_column = "nope"}), DataError);
}

TEST_CASE("csv: LogicalConcB export reloads value-identical") {
  auto ds = generate({"LogicalConcB", 300, 4, std::nullopt});
  auto back = parse_csv(format_csv(ds), {.type_hints = type_hints_of(ds)});
  CHECK(value_identical(ds, back));
  auto unit = generate({"DisjunctN", 200, 2, std::nullopt});
  auto unit_back = parse_csv(format_csv(unit));
  CHECK(value_identical(unit, unit_back));
  CHECK(unit_back.values() == unit.values());
}

TEST_CASE("arff: header domains and violations") {
  const std::string head = "@relation r\n@attribute a {0,1}\n@attribute 'b c' numeric\n@attribute class {no,yes}\n@data\n";
  auto ds = parse_arff(head + "1,0.5,yes\n0,1.5,no\n");
  CHECK(ds.attribute(0).values == std::vector<std::string>{"0", "1"});
  CHECK(ds.attribute(1).name == "b c");
  CHECK(ds.at(0, 0) == 1);
  CHECK(ds.label(0) == 1);
  CHECK_THROWS_AS(parse_arff(head + "2,0.5,yes\n"), DataError);
  CHECK_THROWS_AS(parse_arff(head + "1,?,yes\n"), DataError);
  CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a string\n@attribute c {0,1}\n@data\nx,0\n"), DataError);
  CHECK_THROWS_AS(parse_arff("@relation r\n@attribute a {0,1}\n@attribute c numeric\n@data\n0,1\n"), DataError);
}

TEST_CASE("arff: every synthetic dataset round-trips exactly") {
  for (const auto& name : synthetic_names()) {
    CAPTURE(name);
    auto ds = generate({name, 150, 3, std::nullopt});
    CHECK(parse_arff(format_arff(ds)) == ds);
  }
}

TEST_CASE("arff: file round trip") {
  auto ds = efc::testing::toy(2, 100);
  auto path = std::filesystem::temp_directory_path() / "efc_data_roundtrip.arff";
  write_arff(ds, path);
  CHECK(load_arff(path) == ds);
  std::filesystem::remove(path);
}

TEST_CASE("discretize") {
  auto ds = parse_csv("a,b,k,class\n0,-2,3,0\n1,6,3,1\n0.5,0,3,0\n");
  CHECK(discretize(ds, 0, 4) == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(discretize(ds, 1, 2) == std::vector<double>{2.0});
  CHECK(discretize(ds, 2, 4).empty());
  CHECK_THROWS_AS(discretize(ds, 0, 1), ConfigError);
  auto nominal = parse_csv("a,class\nx,0\ny,1\n");
  CHECK_THROWS_AS(discretize(nominal, 0, 4), ConfigError);
}

TEST_CASE("discretize: cuts increase and partition the range into bins cells") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    double lo = rng.uniform() * 10 - 5;
    double hi = lo + rng.uniform() * 7 + 1e-6;
    int bins = 2 + static_cast<int>(rng.below(8));
    auto cuts = equal_width_cuts(lo, hi, bins);
    REQUIRE(cuts.size() == static_cast<std::size_t>(bins - 1));
    for (std::size_t k = 1; k < cuts.size(); ++k) CHECK(cuts[k - 1] < cuts[k]);
    CHECK(bin_of(cuts, lo) == 0);
    CHECK(bin_of(cuts, hi) == bins - 1);
    std::set<int> seen;
    for (int s = 0; s <= 1000; ++s) seen.insert(bin_of(cuts, lo + (hi - lo) * s / 1000.0));
    CHECK(seen.size() == static_cast<std::size_t>(bins));
  }
}

TEST_CASE("augment keeps original columns and appends materialised features") {
  auto ds = efc::testing::toy(1, 400);
  auto num = Feature::make_threshold(ThresholdVariant::NumOfN,
                                     {Condition::equals(1, 1), Condition::equals(2, 1), Condition::equals(0, 0)});
  auto cart = Feature::make_cartesian(0, 5, 2);
  auto out = augment(ds, {num, cart});
  CHECK(out.cols() == 8);
  CHECK(out.checksum(6) == ds.checksum());
  CHECK(out.labels() == ds.labels());
  CHECK(out.attribute(6).numeric());
  std::set<double> counts;
  for (int i = 0; i < out.rows(); ++i) counts.insert(out.at(i, 6));
  CHECK(counts == std::set<double>{0, 1, 2, 3});
  CHECK(out.attribute(7).nominal());
  CHECK(out.attribute(7).value_count() == 4);

  auto logical = Feature::make_logical(LogicalOp::And, {Condition::equals(1, 1), Condition::equals(2, 1)});
  auto b = augment(ds, {logical});
  CHECK(b.attribute(6).values == std::vector<std::string>{"false", "true"});

  auto bad = Feature::make_relational(RelationalOp::LessThan, 0, 17);
  CHECK_THROWS(augment(ds, {bad}));
}
