#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "efc/errors.hpp"
#include "efc/parallel.hpp"
#include "efc/pipeline.hpp"
#include "efc/synth.hpp"

namespace fs = std::filesystem;
using namespace efc;

namespace {

constexpr int kOk = 0, kConfig = 2, kData = 3, kTimeout = 4;

struct DataArgs {
  std::string path;
  std::string class_name;
};

// "synth:NAME[:n[:seed]]" generates instead of loading.
Dataset load_any(const DataArgs& a) {
  if (a.path.rfind("synth:", 0) == 0) {
    SyntheticSpec spec;
    std::string rest = a.path.substr(6);
    auto colon = rest.find(':');
    spec.name = rest.substr(0, colon);
    if (colon != std::string::npos) {
      rest = rest.substr(colon + 1);
      auto c2 = rest.find(':');
      spec.n = std::stoi(rest.substr(0, c2));
      if (c2 != std::string::npos) spec.seed = std::stoull(rest.substr(c2 + 1));
    }
    return generate(spec);
  }
  fs::path p(a.path);
  if (!fs::exists(p)) throw DataError("no such file: " + a.path);
  if (p.extension() == ".arff") return load_arff(p, a.class_name);
  CsvOptions opt;
  opt.class_column = a.class_name;
  return load_csv(p, opt);
}

void save_any(const Dataset& ds, const fs::path& p) {
  if (p.extension() == ".arff")
    write_arff(ds, p);
  else
    write_csv(ds, p);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

struct EfcArgs {
  EfcConfig cfg;
  std::string kinds = "log,rel,cart,rule,thr";
  std::string ops;
  double pci = 0;
  int explain_class = -1;
  bool raw_binary = false;
  double budget_s = 3 * 3600.0;
};

void add_efc_options(CLI::App* app, EfcArgs& a) {
  auto& c = a.cfg;
  app->add_option("--thr-l", c.thr_l, "lowest weight threshold")->capture_default_str();
  app->add_option("--thr-u", c.thr_u, "highest weight threshold")->capture_default_str();
  app->add_option("--step", c.step, "threshold step")->capture_default_str();
  app->add_option("--noise-thr", c.noise_thr, "minimum group support as a fraction of explained rows")
      ->capture_default_str();
  app->add_option("--cf", c.construct.cf, "rule certainty factor threshold")->capture_default_str();
  app->add_option("--pci", a.pci, "stop rule learning once this fraction of the class is covered (0 = off)");
  app->add_option("--bins", c.construct.bins, "equal-width bins for numeric conditions")->capture_default_str();
  app->add_option("--kinds", a.kinds, "feature kinds: log,rel,cart,num,rule,thr or all")->capture_default_str();
  app->add_option("--logical-ops", a.ops, "subset of and,or,equiv,xor,implies");
  app->add_flag("--raw-binary", a.raw_binary, "binary attributes enter logical features as (A=1) only");
  app->add_option("--min-mdl", c.min_mdl, "drop features scoring below this")->capture_default_str();
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--trees", c.forest.tree_count, "forest size")->capture_default_str();
  app->add_option("--samples", c.explain.samples, "sampled permutations per explained instance")
      ->capture_default_str();
  app->add_option("--max-explain", c.explain.max_to_explain, "cap on explained instances")->capture_default_str();
  app->add_option("--inst-thr", c.explain.inst_thr, "minimum class support to be explained")->capture_default_str();
  app->add_option("--explain-class", a.explain_class, "class index to explain (default: minority)");
  app->add_option("--budget", a.budget_s, "wall-clock budget in seconds")->capture_default_str();
}

void finalize(EfcArgs& a) {
  a.cfg.construct.set_kinds(a.kinds);
  if (a.pci > 0) a.cfg.construct.pci = a.pci;
  if (a.explain_class >= 0) a.cfg.explain.class_index = a.explain_class;
  if (a.raw_binary) a.cfg.construct.operands = OperandMode::RawBinary;
  if (!a.ops.empty()) {
    a.cfg.construct.logical_ops.clear();
    std::stringstream ss(a.ops);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "and") a.cfg.construct.logical_ops.push_back(LogicalOp::And);
      else if (item == "or") a.cfg.construct.logical_ops.push_back(LogicalOp::Or);
      else if (item == "equiv") a.cfg.construct.logical_ops.push_back(LogicalOp::Equiv);
      else if (item == "xor") a.cfg.construct.logical_ops.push_back(LogicalOp::Xor);
      else if (item == "implies") a.cfg.construct.logical_ops.push_back(LogicalOp::Implies);
      else throw ConfigError("unknown logical operator '" + item + "'");
    }
  }
  a.cfg.validate();
}

int write_result(const EfcResult& r, const Dataset& ds, const fs::path& out) {
  fs::create_directories(out);
  write_text(out / "features.json", features_to_json(r.features, ds));
  std::vector<std::string> names;
  for (const auto& a : ds.attributes()) names.push_back(a.name);
  write_text(out / "groups.json", groups_to_json(r.groups, names));
  write_arff(r.enriched, out / "enriched.arff");
  write_csv(r.enriched, out / "enriched.csv");
  {
    std::ofstream rep(out / "report.csv", std::ios::binary);
    rep << "rank,kind,mdl,rendering\n";
    for (std::size_t k = 0; k < r.features.size(); ++k) {
      std::string render = r.features[k].feature.render(ds);
      std::string quoted = "\"";
      for (char c : render) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      rep << k + 1 << ',' << r.features[k].feature.kind_name() << ',' << format_real(r.features[k].mdl) << ','
          << quoted << "\"\n";
    }
  }
  {
    std::ofstream t(out / "timings.csv", std::ios::binary);
    t << "phase,ms\n";
    for (const auto& [phase, ms] : r.timings) t << phase << ',' << format_real(ms) << '\n';
  }
  std::cout << "explained class " << ds.class_attr().values[r.class_index] << " (" << r.explained
            << " instances), " << r.groups.size() << " groups, " << r.candidates << " candidates, "
            << r.features.size() << " kept\n";
  if (!r.note.empty()) std::cout << r.note << '\n';
  std::cout << format_feature_table(r.features, ds);
  if (r.timed_out) {
    std::cerr << "budget exhausted: partial result written\n";
    return kTimeout;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  parallel::init_from_env();
  CLI::App app{"Explanation-guided feature construction"};
  app.require_subcommand(1);

  DataArgs data;
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", data.path, "CSV/ARFF file or synth:NAME[:n[:seed]]")->required();
    sub->add_option("--class", data.class_name, "class attribute (default: last column)");
  };

  EfcArgs efc_args;
  std::string out_dir = "efc_out";

  auto* run = app.add_subcommand("run", "run EFC and write the enriched dataset");
  add_data(run);
  add_efc_options(run, efc_args);
  run->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* exh = app.add_subcommand("exhaustive", "construct over all attribute combinations");
  add_data(exh);
  add_efc_options(exh, efc_args);
  exh->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string classifier = "nb", mode = "base";
  int folds = 10;
  auto* cv = app.add_subcommand("cv", "cross-validated accuracy with optional construction");
  add_data(cv);
  add_efc_options(cv, efc_args);
  cv->add_option("--classifier", classifier, "dt, nb or rf")->capture_default_str();
  cv->add_option("--construct", mode, "base, log, rel, cart, drthr, num, all or fs")->capture_default_str();
  cv->add_option("--folds", folds, "number of folds")->capture_default_str();

  SyntheticSpec spec;
  double noise = -1;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "generate a synthetic dataset");
  syn->add_option("--name", spec.name, "dataset name")->required();
  syn->add_option("--n", spec.n, "instances")->capture_default_str();
  syn->add_option("--seed", spec.seed, "seed")->capture_default_str();
  syn->add_option("--noise", noise, "class noise percent (default: the dataset's own)");
  syn->add_option("--out", synth_out, "output .csv or .arff")->required();

  std::string matrix_out;
  auto* exp = app.add_subcommand("explain", "write the explanation matrix of the explained class");
  add_data(exp);
  add_efc_options(exp, efc_args);
  exp->add_option("--out", matrix_out, "output CSV")->required();

  std::string matrix_in, groups_out;
  auto* grp = app.add_subcommand("groups", "mine candidate groups from an explanation matrix CSV");
  grp->add_option("--matrix", matrix_in, "explanation matrix CSV")->required();
  add_efc_options(grp, efc_args);
  grp->add_option("--out", groups_out, "output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*syn) {
      if (noise >= 0) spec.noise_percent = noise;
      save_any(generate(spec), synth_out);
      return kOk;
    }
    finalize(efc_args);
    const Budget budget = Budget::after(std::chrono::duration<double>(efc_args.budget_s));
    if (*grp) {
      auto e = read_explanations_csv(matrix_in);
      auto groups = collect_groups(e, efc_args.cfg.thr_l, efc_args.cfg.thr_u, efc_args.cfg.step,
                                   efc_args.cfg.noise_thr);
      std::string json = groups_to_json(groups, e.attribute_names);
      if (groups_out.empty())
        std::cout << json << '\n';
      else
        write_text(groups_out, json);
      return kOk;
    }
    Dataset ds = load_any(data);
    if (*run) return write_result(run_efc(ds, efc_args.cfg, budget), ds, out_dir);
    if (*exh) return write_result(run_exhaustive(ds, efc_args.cfg, budget), ds, out_dir);
    if (*exp) {
      ForestParams fp = efc_args.cfg.forest;
      fp.seed = derive_seed(efc_args.cfg.seed, 1);
      auto forest = train_random_forest(ds, fp);
      ExplainConfig ec = efc_args.cfg.explain;
      ec.seed = derive_seed(efc_args.cfg.seed, 2);
      auto sel = select_explanation_instances(ds, ec);
      write_explanations_csv(get_explanations(ds, forest, sel, ec), matrix_out);
      std::cout << "explained class " << ds.class_attr().values[sel.class_index] << ", " << sel.instances.size()
                << " instances\n";
      return kOk;
    }
    if (*cv) {
      CvConfig c;
      c.folds = folds;
      c.seed = efc_args.cfg.seed;
      c.mode = parse_construct_mode(mode);
      c.efc = efc_args.cfg;
      c.forest_trees = efc_args.cfg.forest.tree_count;
      auto r = cross_validate(ds, parse_classifier(classifier), c);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      std::printf("CA %.2f (sd %.2f) over %d folds, %s/%s\n", r.mean, r.stddev, folds, classifier.c_str(),
                  mode.c_str());
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
