#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "finestruct/finestruct.hpp"

namespace finestruct::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNothingPlotted = 3 };

inline std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("FINESTRUCT_SEED");
  if (!text || !*text) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(text);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::InvalidArgument, "FINESTRUCT_SEED is not an unsigned integer");
  return v;
}

struct SeedChoice {
  std::uint64_t value = 1;
  std::string source = "default";
};

inline SeedChoice resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return {*flag, "flag"};
  if (auto e = env_seed()) return {*e, "env"};
  return {};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string replace_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of("/\\");
  const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash) ? path.substr(0, dot) : path;
  return stem + suffix;
}

inline std::string na_or(const std::optional<double>& v) {
  if (!v) return "NA";
  return format_csv_number(*v);
}

struct PlotOptions {
  std::string input;
  std::string output = "mdplot.svg";
  std::string report;
  std::string manifest;
  std::string model;
  std::string scaling = "none";
  std::string ordering = "default";
  std::string title = "MD plot";
  std::size_t sample_size = 500000;
  std::size_t min_data = 50;
  std::size_t min_unique = 12;
  double alpha = 0.05;
  std::size_t replicates = kDefaultReplicates;
  std::optional<std::uint64_t> seed;
  bool no_gaussian = false;
  bool boxplot = false;
  std::vector<double> hlines;
  int width = 900;
  int height = 600;
};

inline int cmd_plot(const PlotOptions& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  CsvTable table;
  try {
    table = read_csv_file(o.input);
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  EngineConfig cfg;
  RenderConfig rcfg;
  SeedChoice seed;
  try {
    seed = resolve_seed(o.seed);
    cfg.sample_size_cap = o.sample_size;
    cfg.min_data = o.min_data;
    cfg.min_unique = o.min_unique;
    cfg.alpha = o.alpha;
    cfg.replicates = o.replicates;
    cfg.scaling = parse_scaling_mode(o.scaling);
    cfg.ordering = parse_ordering(o.ordering);
    cfg.robust_gaussian = !o.no_gaussian;
    cfg.boxplot_overlay = o.boxplot;
    cfg.seed = seed.value;
    cfg.validate();
    rcfg.width_px = o.width;
    rcfg.height_px = o.height;
    rcfg.reference_lines = o.hlines;
    rcfg.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const std::string report_path = o.report.empty() ? replace_suffix(o.output, ".report.json") : o.report;
  const std::string manifest_path = o.manifest.empty() ? replace_suffix(o.output, ".manifest.json") : o.manifest;

  Json manifest{{"tool", kToolName},
                {"version", kToolVersion},
                {"command", "plot"},
                {"argv", argv},
                {"rng", kRngName},
                {"seed", seed.value},
                {"seed_source", seed.source},
                {"input", o.input},
                {"config", to_json(cfg)},
                {"render",
                 {{"width_px", rcfg.width_px},
                  {"height_px", rcfg.height_px},
                  {"column_width_fraction", rcfg.column_width_fraction},
                  {"reference_lines", rcfg.reference_lines}}}};

  int code = kOk;
  std::optional<PlotBuild> build;
  try {
    build = build_plot_model(table.features, cfg);
    build->model.title = o.title;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoPlottableFeatures) throw;
    err << "error: " << e.what() << "\n";
    code = kNothingPlotted;
  }

  Json features = Json::array();
  for (std::size_t c = 0; c < table.features.size(); ++c) {
    const auto& f = table.features[c];
    Json diag = Json::array();
    std::string status = build ? "plotted" : "skipped";
    if (build) {
      for (const auto& d : build->diagnostics)
        if (d.feature == f.name) {
          diag.push_back(d.message);
          if (d.skipped) status = "skipped";
        }
    }
    features.push_back(Json{{"name", f.name},
                            {"column", c},
                            {"values", f.size()},
                            {"missing", f.missing_count},
                            {"non_numeric", table.non_numeric[c]},
                            {"status", status},
                            {"diagnostics", diag}});
  }
  manifest["features"] = features;
  manifest["exit_code"] = code;

  try {
    if (build) {
      write_file(o.output, render_svg(build->model, rcfg));
      write_file(report_path, build_report(*build, cfg).dump(2) + "\n");
      if (!o.model.empty()) write_file(o.model, to_json(build->model).dump(2) + "\n");
      manifest["outputs"] = Json{{"svg", o.output}, {"report", report_path}, {"model", o.model}};
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
    manifest["timing"] = Json{{"total_ms", elapsed.count()}};
    write_file(manifest_path, manifest.dump(2) + "\n");
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (build)
    out << "plotted " << build->model.glyphs.size() << " feature(s) to " << o.output << "\n";
  return code;
}

struct TestOptions {
  std::string input;
  std::string column;
  std::size_t replicates = kDefaultReplicates;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

inline int cmd_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
  CsvTable table;
  try {
    table = read_csv_file(o.input);
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  const FeatureSeries* f = nullptr;
  for (const auto& c : table.features)
    if (c.name == o.column) f = &c;
  if (!f) {
    err << "error: no column named '" << o.column << "'\n";
    return kInputError;
  }
  if (o.replicates < 1) {
    err << "error: replicates must be positive\n";
    return kInputError;
  }
  const auto seed = resolve_seed(o.seed);

  std::vector<std::string> diagnostics;
  std::optional<double> dip_d, dip_p;
  std::optional<SkewnessTest> skew;
  try {
    dip_d = dip_statistic(f->values);
    dip_p = dip_pvalue_mc(*dip_d, f->size(), o.replicates, dip_null_seed(seed.value));
  } catch (const Error& e) {
    diagnostics.push_back(e.what());
  }
  try {
    skew = dagostino_skewness(f->values);
  } catch (const Error& e) {
    diagnostics.push_back(e.what());
  }
  const auto opt = [](bool has, double v) { return has ? std::optional<double>(v) : std::nullopt; };

  if (o.json) {
    Json diag = Json::array();
    for (const auto& d : diagnostics) diag.push_back(d);
    Json j{{"schema_version", kReportSchemaVersion},
           {"column", f->name},
           {"n", f->size()},
           {"missing", f->missing_count},
           {"dip_d", optional_number(dip_d)},
           {"dip_p", optional_number(dip_p)},
           {"dip_replicates", o.replicates},
           {"skew_g1", optional_number(opt(skew.has_value(), skew ? skew->g1 : 0))},
           {"skew_z", optional_number(opt(skew.has_value(), skew ? skew->z : 0))},
           {"skew_p", optional_number(opt(skew.has_value(), skew ? skew->p : 0))},
           {"seed", seed.value},
           {"diagnostics", diag}};
    out << j.dump(2) << "\n";
  } else {
    out << "column: " << f->name << "\n"
        << "n: " << f->size() << "\n"
        << "missing: " << f->missing_count << "\n"
        << "dip_D: " << na_or(dip_d) << "\n"
        << "dip_p: " << na_or(dip_p) << " (B=" << o.replicates << ")\n"
        << "skew_g1: " << na_or(opt(skew.has_value(), skew ? skew->g1 : 0)) << "\n"
        << "skew_z: " << na_or(opt(skew.has_value(), skew ? skew->z : 0)) << "\n"
        << "skew_p: " << na_or(opt(skew.has_value(), skew ? skew->p : 0)) << "\n";
    for (const auto& d : diagnostics) out << "diagnostic: " << d << "\n";
  }
  return kOk;
}

// "mean:sd:weight,mean:sd:weight,..."
inline GaussMixSpec parse_mixture(const std::string& text) {
  GaussMixSpec spec;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    double parts[3];
    std::stringstream fields(item);
    std::string field;
    int k = 0;
    while (std::getline(fields, field, ':')) {
      if (k == 3) throw Error(ErrorKind::BadSpec, "component '" + item + "' needs mean:sd:weight");
      bool bad = false;
      parts[k] = parse_cell(field, &bad);
      if (bad || !std::isfinite(parts[k])) throw Error(ErrorKind::BadSpec, "bad number in '" + item + "'");
      ++k;
    }
    if (k != 3) throw Error(ErrorKind::BadSpec, "component '" + item + "' needs mean:sd:weight");
    spec.components.push_back({parts[2], parts[0], parts[1]});
  }
  spec.validate();
  return spec;
}

struct GenOptions {
  std::string kind;
  std::size_t n = 1000;
  std::optional<std::uint64_t> seed;
  double low = -2, high = 2;
  std::string components = "0:1:1";
  double xi = 1.0;
  bool raw = false;
  std::string name;
  std::string output;
};

inline int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  FeatureSeries f;
  try {
    if (o.n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
    const auto seed = resolve_seed(o.seed).value;
    if (o.kind == "uniform")
      f = sample_uniform(o.n, o.low, o.high, seed);
    else if (o.kind == "gaussmix")
      f = sample_gauss_mixture(o.n, parse_mixture(o.components), seed);
    else if (o.kind == "skewnorm")
      f = sample_skew_normal(o.n, SkewSpec{o.xi, !o.raw}, seed);
    else
      throw Error(ErrorKind::InvalidArgument, "unknown generator '" + o.kind + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (!o.name.empty()) f.name = o.name;
  const auto csv = write_single_column_csv(f);
  if (o.output.empty()) {
    out << csv;
  } else {
    try {
      write_file(o.output, csv);
    } catch (const std::runtime_error& e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
  }
  return kOk;
}

struct BenchOptions {
  std::string experiment;
  std::vector<double> sweep;
  std::size_t iterations = 100;
  std::size_t replicates = 1000;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string output;
};

inline int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  BenchResult result;
  try {
    BenchConfig cfg;
    cfg.experiment = parse_bench_experiment(o.experiment);
    cfg.sweep = o.sweep;
    if (cfg.sweep.empty())
      cfg.sweep = cfg.experiment == BenchExperiment::Bimodal ? std::vector<double>{2.0, 2.2, 2.4, 2.5, 2.6}
                                                            : std::vector<double>{0.9, 0.95, 1.0, 1.05, 1.1};
    cfg.iterations = o.iterations;
    cfg.replicates = o.replicates;
    cfg.n = o.n;
    cfg.seed = resolve_seed(o.seed).value;
    result = run_bench(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  const auto csv = bench_to_csv(result);
  if (o.output.empty()) {
    out << csv;
  } else {
    try {
      write_file(o.output, csv);
    } catch (const std::runtime_error& e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
  }
  return kOk;
}

// Full command line, argv[0] included.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fine-structure analysis and mirrored-density plots of univariate distributions", "finestruct"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  PlotOptions plot;
  auto* p = app.add_subcommand("plot", "Render an MD plot of every CSV column with report and manifest");
  p->add_option("input", plot.input, "CSV file with a header row")->required();
  p->add_option("-o,--output", plot.output, "SVG output path");
  p->add_option("--report", plot.report, "report JSON path (default: <output>.report.json)");
  p->add_option("--manifest", plot.manifest, "run manifest path (default: <output>.manifest.json)");
  p->add_option("--model", plot.model, "also write the plot model as JSON");
  p->add_option("--scaling", plot.scaling, "none|percentalize|robust|completerobust|log");
  p->add_option("--ordering", plot.ordering, "default|columnwise|alphabetical|statistics");
  p->add_option("--sample-size", plot.sample_size, "total cell budget before subsampling");
  p->add_option("--min-data", plot.min_data, "fewest values for a density estimate");
  p->add_option("--min-unique", plot.min_unique, "fewest unique values for a density estimate");
  p->add_option("--alpha", plot.alpha, "significance level of the Gaussian overlay gate");
  p->add_option("--replicates", plot.replicates, "Monte Carlo replicates for dip p-values");
  p->add_option("--seed", plot.seed, "random seed (fallback: FINESTRUCT_SEED)");
  p->add_flag("--no-gaussian", plot.no_gaussian, "never overlay the robust Gaussian");
  p->add_flag("--boxplot", plot.boxplot, "overlay a box plot on every feature");
  p->add_option("--hline", plot.hlines, "reference line at this value (repeatable)")->allow_extra_args(false);
  p->add_option("--title", plot.title, "plot title");
  p->add_option("--width", plot.width, "SVG width in px");
  p->add_option("--height", plot.height, "SVG height in px");

  TestOptions test;
  auto* t = app.add_subcommand("test", "Dip and D'Agostino skewness tests for one column");
  t->add_option("input", test.input, "CSV file with a header row")->required();
  t->add_option("-c,--column", test.column, "column name")->required();
  t->add_option("--replicates", test.replicates, "Monte Carlo replicates for the dip p-value");
  t->add_option("--seed", test.seed, "random seed (fallback: FINESTRUCT_SEED)");
  t->add_flag("--json", test.json, "print JSON instead of text");

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a seeded synthetic sample as one-column CSV");
  g->add_option("kind", gen.kind, "uniform|gaussmix|skewnorm")->required();
  g->add_option("-n", gen.n, "sample size");
  g->add_option("--seed", gen.seed, "random seed (fallback: FINESTRUCT_SEED)");
  g->add_option("--low", gen.low, "uniform lower bound");
  g->add_option("--high", gen.high, "uniform upper bound");
  g->add_option("--components", gen.components, "mixture as mean:sd:weight,...");
  g->add_option("--xi", gen.xi, "skew parameter (1 = normal)");
  g->add_flag("--raw", gen.raw, "do not standardize the skewed normal");
  g->add_option("--name", gen.name, "column header");
  g->add_option("-o,--output", gen.output, "output file (default: stdout)");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Monte Carlo p-value sweeps (bimodal dip / skewness)");
  b->add_option("experiment", bench.experiment, "bimodal|skew")->required();
  b->add_option("--sweep", bench.sweep, "comma separated parameter values")->delimiter(',');
  b->add_option("--iterations", bench.iterations, "samples per sweep value");
  b->add_option("--replicates", bench.replicates, "dip null replicates (bimodal)");
  b->add_option("-n", bench.n, "sample size (default 31000 bimodal, 15000 skew)");
  b->add_option("--seed", bench.seed, "random seed (fallback: FINESTRUCT_SEED)");
  b->add_option("-o,--output", bench.output, "results CSV (default: stdout)");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*p) return cmd_plot(plot, argv, out, err);
    if (*t) return cmd_test(test, out, err);
    if (*g) return cmd_gen(gen, out, err);
    return cmd_bench(bench, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace finestruct::cli
