#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finestruct/error.hpp"
#include "finestruct/parallel.hpp"
#include "finestruct/random.hpp"
#include "finestruct/stats.hpp"

namespace finestruct {

// Hartigan & Hartigan dip of ascending data: the sup-distance between the
// empirical CDF and the closest unimodal CDF. Works on the greatest convex
// minorant / least concave majorant, shrinking the modal interval [low, high]
// until the largest GCM-LCM gap no longer exceeds the current dip.
inline double dip_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) throw Error(ErrorKind::TooFewPoints, "dip needs at least 2 values");
  // 1-based views keep the index arithmetic close to the classical algorithm.
  auto x = [&](std::size_t i) { return sorted[i - 1]; };

  // Everything below works with 2n * dip; the lower bound is one step.
  double dip = 1.0;
  if (x(n) == x(1)) return dip / (2.0 * static_cast<double>(n));

  std::vector<std::size_t> mn(n + 1), mj(n + 1), gcm(n + 2), lcm(n + 2);

  // Convex minorant predecessors.
  mn[1] = 1;
  for (std::size_t j = 2; j <= n; ++j) {
    mn[j] = j - 1;
    for (;;) {
      const std::size_t a = mn[j], b = mn[a];
      if (a == 1 || (x(j) - x(a)) * static_cast<double>(a - b) < (x(a) - x(b)) * static_cast<double>(j - a)) break;
      mn[j] = b;
    }
  }
  // Concave majorant successors.
  mj[n] = n;
  for (std::size_t k = n - 1; k >= 1; --k) {
    mj[k] = k + 1;
    for (;;) {
      const std::size_t a = mj[k], b = mj[a];
      if (a == n || (x(k) - x(a)) * (static_cast<double>(a) - static_cast<double>(b)) <
                        (x(a) - x(b)) * (static_cast<double>(k) - static_cast<double>(a)))
        break;
      mj[k] = b;
    }
  }

  std::size_t low = 1, high = n;
  for (;;) {
    std::size_t i = 1;
    gcm[1] = high;
    while (gcm[i] > low) {
      gcm[i + 1] = mn[gcm[i]];
      ++i;
    }
    const std::size_t l_gcm = i;
    std::size_t ig = l_gcm, ix = l_gcm - 1;

    i = 1;
    lcm[1] = low;
    while (lcm[i] < high) {
      lcm[i + 1] = mj[lcm[i]];
      ++i;
    }
    const std::size_t l_lcm = i;
    std::size_t ih = l_lcm, iv = 2;

    // Largest vertical distance between GCM and LCM on [low, high].
    long double d = 0.0L;
    if (l_gcm != 2 || l_lcm != 2) {
      do {
        const std::size_t gx = gcm[ix], lv = lcm[iv];
        long double dx;
        if (gx > lv) {
          const std::size_t g1 = gcm[ix + 1];
          dx = (static_cast<long double>(lv) - static_cast<long double>(g1) + 1.0L) -
               (static_cast<long double>(x(lv)) - x(g1)) * static_cast<long double>(gx - g1) / (x(gx) - x(g1));
          ++iv;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv - 1;
          }
        } else {
          const std::size_t l1 = lcm[iv - 1];
          dx = (static_cast<long double>(x(gx)) - x(l1)) * static_cast<long double>(lv - l1) / (x(lv) - x(l1)) -
               (static_cast<long double>(gx) - static_cast<long double>(l1) - 1.0L);
          --ix;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv;
          }
        }
        if (ix < 1) ix = 1;
        if (iv > l_lcm) iv = l_lcm;
      } while (gcm[ix] != lcm[iv]);
    } else {
      d = 1.0L;
    }
    if (d < dip) break;

    // Dips of the convex minorant and concave majorant on the current interval.
    double dip_l = 0.0;
    for (std::size_t j = ig; j < l_gcm; ++j) {
      double max_t = 1.0;
      const std::size_t jb = gcm[j + 1], je = gcm[j];
      if (je - jb > 1 && x(je) != x(jb)) {
        const double c = static_cast<double>(je - jb) / (x(je) - x(jb));
        for (std::size_t jj = jb; jj <= je; ++jj) {
          const double t = static_cast<double>(jj - jb + 1) - (x(jj) - x(jb)) * c;
          max_t = std::max(max_t, t);
        }
      }
      dip_l = std::max(dip_l, max_t);
    }
    double dip_u = 0.0;
    for (std::size_t j = ih; j < l_lcm; ++j) {
      double max_t = 1.0;
      const std::size_t jb = lcm[j], je = lcm[j + 1];
      if (je - jb > 1 && x(je) != x(jb)) {
        const double c = static_cast<double>(je - jb) / (x(je) - x(jb));
        for (std::size_t jj = jb; jj <= je; ++jj) {
          const double t = (x(jj) - x(jb)) * c - (static_cast<double>(jj) - static_cast<double>(jb) - 1.0);
          max_t = std::max(max_t, t);
        }
      }
      dip_u = std::max(dip_u, max_t);
    }
    dip = std::max(dip, std::max(dip_l, dip_u));

    // No progress on the modal interval: done.
    if (low == gcm[ig] && high == lcm[ih]) break;
    low = gcm[ig];
    high = lcm[ih];
  }
  return dip / (2.0 * static_cast<double>(n));
}

inline double dip_statistic(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::TooFewPoints, "dip needs at least 2 values");
  return dip_sorted(sorted_copy(values));
}

// Monte Carlo null distribution of the dip for uniform samples of size n.
// Replicate b draws from its own (seed, b) stream.
class DipNullDistribution {
 public:
  DipNullDistribution(std::size_t n, std::size_t replicates, std::uint64_t seed)
      : n_(n), seed_(seed), dips_(replicates) {
    if (n < 2) throw Error(ErrorKind::TooFewPoints, "dip null needs n >= 2");
    if (replicates < 1) throw Error(ErrorKind::InvalidArgument, "need at least one replicate");
    parallel_for(replicates, [&](std::size_t b) {
      Rng rng(derive_seed(seed, b));
      dips_[b] = dip_sorted(sorted_uniform_sample(n, rng));
    });
    std::sort(dips_.begin(), dips_.end());
  }

  std::size_t n() const { return n_; }
  std::size_t replicates() const { return dips_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> sorted_dips() const { return dips_; }

  // Add-one estimate (1 + #{null >= d}) / (B + 1).
  double pvalue(double d) const {
    const auto at_least = static_cast<double>(dips_.end() - std::lower_bound(dips_.begin(), dips_.end(), d));
    return (1.0 + at_least) / (static_cast<double>(dips_.size()) + 1.0);
  }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::vector<double> dips_;
};

inline constexpr std::size_t kDefaultReplicates = 2000;

inline double dip_pvalue_mc(double d, std::size_t n, std::size_t replicates, std::uint64_t seed) {
  if (!(d > 0.0)) throw Error(ErrorKind::InvalidArgument, "dip must be positive");
  return DipNullDistribution(n, replicates, seed).pvalue(d);
}

inline double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

struct SkewnessTest {
  double g1 = 0;
  double z = 0;
  double p = 1;
};

// D'Agostino's transformation of sample skewness to an approximately standard
// normal statistic.
inline SkewnessTest dagostino_skewness(std::span<const double> values) {
  const std::size_t count = values.size();
  if (count < 9) throw Error(ErrorKind::TooFewPoints, "skewness test needs at least 9 values");
  const auto cm = central_moments(values);
  if (!(cm.m2 > 0.0)) throw Error(ErrorKind::ConstantFeature, "skewness of constant data");
  const double n = static_cast<double>(count);
  SkewnessTest t;
  t.g1 = cm.m3 / std::pow(cm.m2, 1.5);
  const double y = t.g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
  const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                       ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  t.z = delta * std::asinh(y / alpha);
  t.p = two_sided_normal_p(t.z);
  return t;
}

struct TestReport {
  std::size_t n = 0;
  double dip_d = 0;
  double dip_p = 1;
  std::size_t dip_replicates = 0;
  // Absent when the skewness test is undefined (n < 9).
  std::optional<SkewnessTest> skew;
  std::uint64_t seed = 0;
};

struct GateResult {
  bool overlay = false;
  std::optional<TestReport> report;
  std::string diagnostic;
};

// Overlay a Gaussian only when neither test rejects at level alpha. A null
// distribution for the right n can be passed in to avoid recomputing it.
inline GateResult gaussian_gate(const FeatureSeries& f, double alpha, std::size_t replicates, std::uint64_t seed,
                                const DipNullDistribution* null = nullptr) {
  GateResult out;
  try {
    TestReport r;
    r.n = f.size();
    r.seed = seed;
    r.dip_d = dip_statistic(f.values);
    if (null && null->n() == r.n && null->replicates() == replicates && null->seed() == seed) {
      r.dip_p = null->pvalue(r.dip_d);
    } else {
      r.dip_p = DipNullDistribution(r.n, replicates, seed).pvalue(r.dip_d);
    }
    r.dip_replicates = replicates;
    try {
      r.skew = dagostino_skewness(f.values);
    } catch (const Error& e) {
      out.diagnostic = e.what();
    }
    out.overlay = r.skew && r.dip_p >= alpha && r.skew->p >= alpha;
    out.report = r;
  } catch (const Error& e) {
    out.overlay = false;
    out.diagnostic = e.what();
  }
  return out;
}

}  // namespace finestruct
