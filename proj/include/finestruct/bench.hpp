#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finestruct/csv.hpp"
#include "finestruct/error.hpp"
#include "finestruct/generators.hpp"
#include "finestruct/hypothesis.hpp"
#include "finestruct/parallel.hpp"

namespace finestruct {

// Monte Carlo sweeps: bimodal = dip test on an equal two-Gaussian mixture whose
// second mean is swept; skew = D'Agostino test on a skewed normal whose xi is swept.
enum class BenchExperiment { Bimodal, Skew };

inline BenchExperiment parse_bench_experiment(std::string_view text) {
  if (text == "bimodal") return BenchExperiment::Bimodal;
  if (text == "skew") return BenchExperiment::Skew;
  throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + std::string(text) + "'");
}

struct BenchConfig {
  BenchExperiment experiment = BenchExperiment::Bimodal;
  std::vector<double> sweep;
  std::size_t iterations = 100;
  std::size_t replicates = 1000;  // dip null size; unused by the skew experiment
  std::size_t n = 0;              // 0 picks 31000 (bimodal) or 15000 (skew)
  std::uint64_t seed = 1;

  std::size_t sample_size() const {
    if (n) return n;
    return experiment == BenchExperiment::Bimodal ? 31000 : 15000;
  }
};

struct BenchRow {
  double param;
  std::size_t iteration;
  double p;
};

struct BenchSummary {
  double param;
  double median;
  double p99;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;
};

inline void validate(const BenchConfig& cfg) {
  if (cfg.sweep.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one value");
  if (cfg.iterations < 1) throw Error(ErrorKind::InvalidArgument, "iterations must be positive");
  for (double v : cfg.sweep) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "sweep values must be finite");
    if (cfg.experiment == BenchExperiment::Skew && !(v > 0.0))
      throw Error(ErrorKind::InvalidArgument, "xi must be positive");
  }
  if (cfg.experiment == BenchExperiment::Skew && cfg.sample_size() < 9)
    throw Error(ErrorKind::InvalidArgument, "skew experiment needs n >= 9");
  if (cfg.experiment == BenchExperiment::Bimodal) {
    if (cfg.sample_size() < 2) throw Error(ErrorKind::InvalidArgument, "bimodal experiment needs n >= 2");
    if (cfg.replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be positive");
  }
}

inline GaussMixSpec bimodal_spec(double second_mean) {
  return GaussMixSpec{{{0.5, 0.0, 1.0}, {0.5, second_mean, 1.0}}};
}

inline BenchResult run_bench(const BenchConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.sample_size();
  std::optional<DipNullDistribution> null;
  if (cfg.experiment == BenchExperiment::Bimodal) null.emplace(n, cfg.replicates, derive_seed(cfg.seed, 0xD1B));

  BenchResult result;
  result.rows.resize(cfg.sweep.size() * cfg.iterations);
  parallel_for(result.rows.size(), [&](std::size_t k) {
    const std::size_t s = k / cfg.iterations, it = k % cfg.iterations;
    const double param = cfg.sweep[s];
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, s + 1), it);
    double p;
    if (cfg.experiment == BenchExperiment::Bimodal) {
      const auto f = sample_gauss_mixture(n, bimodal_spec(param), seed);
      p = null->pvalue(dip_statistic(f.values));
    } else {
      const auto f = sample_skew_normal(n, SkewSpec{param, true}, seed);
      p = dagostino_skewness(f.values).p;
    }
    result.rows[k] = {param, it, p};
  });

  for (std::size_t s = 0; s < cfg.sweep.size(); ++s) {
    std::vector<double> ps;
    for (std::size_t it = 0; it < cfg.iterations; ++it) ps.push_back(result.rows[s * cfg.iterations + it].p);
    std::sort(ps.begin(), ps.end());
    result.summaries.push_back({cfg.sweep[s], quantile(ps, 0.5), quantile(ps, 0.99)});
  }
  return result;
}

// param,iteration,p rows followed by "median" and "p99" summary rows per value.
inline std::string bench_to_csv(const BenchResult& r) {
  std::string out = "param,iteration,p\n";
  for (const auto& row : r.rows)
    out += format_csv_number(row.param) + "," + std::to_string(row.iteration) + "," + format_csv_number(row.p) + "\n";
  for (const auto& s : r.summaries) {
    out += format_csv_number(s.param) + ",median," + format_csv_number(s.median) + "\n";
    out += format_csv_number(s.param) + ",p99," + format_csv_number(s.p99) + "\n";
  }
  return out;
}

}  // namespace finestruct
