#ifndef PMCF_EXPERIMENTS_HPP
#define PMCF_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "pmcf/evolution.hpp"
#include "pmcf/io.hpp"

namespace pmcf {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
/// independent, so the results do not depend on the thread count.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Single run with optional file output; the common building block below.
struct RunOutcome {
  RunResult result;
  std::vector<DiagnosticsRecord> records;
};

inline RunOutcome run_with_output(const RunConfig& config, const std::filesystem::path& dir) {
  MeanCurvatureFlow flow(config);
  RunWriter writer(dir, config);
  RunOutcome out;
  Observer write = writer.observer(flow.space().mesh());
  out.result = run(flow, [&](const DiagnosticsRecord& r, const FlowState& s) {
    out.records.push_back(r);
    write(r, s);
  });
  return out;
}

inline std::filesystem::path subdir(const std::filesystem::path& base, const std::string& name) {
  return base.empty() ? base : base / name;
}

// ---- spatial convergence ----

struct EocRow {
  int level = 0;
  double h_max = 0.0;
  ErrorTriple errors;
  bool pinched = false;
  double cpu_s = 0.0;
};

struct EocReport {
  std::vector<EocRow> rows;
  std::vector<double> eoc1, eoc2, eoc3;  // one shorter than rows
};

inline EocReport run_eoc(RunConfig base, const std::vector<int>& levels, const std::filesystem::path& out = {},
                         int jobs = 1) {
  if (!std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    throw Error(ErrorKind::InvalidConfig, "levels must be strictly ascending");
  }
  base.surface = InitialSurface::Sphere;
  base.scheme = Scheme::Midpoint;
  EocReport rep;
  rep.rows.resize(levels.size());
  parallel_for(static_cast<int>(levels.size()), jobs, [&](int i) {
    RunConfig c = base;
    c.level = levels[i];
    const RunOutcome o = run_with_output(c, subdir(out, "level_" + std::to_string(c.level)));
    EocRow& row = rep.rows[i];
    row.level = c.level;
    row.h_max = build_icosphere(c.level).h_max();
    row.errors = o.result.errors;
    row.pinched = o.result.pinched;
    row.cpu_s = o.result.cpu_s;
  });
  if (rep.rows.size() > 1) {
    std::vector<double> h, e1, e2, e3;
    for (const auto& r : rep.rows) {
      h.push_back(r.h_max);
      e1.push_back(r.errors.E1);
      e2.push_back(r.errors.E2);
      e3.push_back(r.errors.E3);
    }
    rep.eoc1 = eoc(e1, h);
    rep.eoc2 = eoc(e2, h);
    rep.eoc3 = eoc(e3, h);
  }
  if (!out.empty()) {
    std::ofstream f = open_output(out / "eoc.csv");
    f << "level,h_max,E1,eoc1,E2,eoc2,E3,eoc3\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      auto rate = [&](const std::vector<double>& v) { return i == 0 ? std::string() : format_fixed(v[i - 1]); };
      f << r.level << ',' << format_fixed(r.h_max) << ',' << format_fixed(r.errors.E1) << ',' << rate(rep.eoc1) << ','
        << format_fixed(r.errors.E2) << ',' << rate(rep.eoc2) << ',' << format_fixed(r.errors.E3) << ','
        << rate(rep.eoc3) << '\n';
    }
  }
  return rep;
}

// ---- mesh quality versus alpha ----

struct AlphaRun {
  double alpha = 0.0;
  bool pinched = false;
  double t_pinch = 0.0;
  std::vector<DiagnosticsRecord> records;

  /// Largest relative area increase between consecutive records (<= 0 if monotone).
  double max_area_increase() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < records.size(); ++i) {
      worst = std::max(worst, (records[i].area - records[i - 1].area) / records[i - 1].area);
    }
    return worst;
  }

  /// sigma_max at the record closest to time t, NaN if the run ended earlier.
  double sigma_at(double t, double tau) const {
    for (const auto& r : records) {
      if (std::abs(r.t - t) <= 0.5 * tau) return r.sigma_max;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

inline std::string alpha_label(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "alpha_%g", alpha);
  return buf;
}

inline std::vector<AlphaRun> run_alpha_study(RunConfig base, const std::vector<double>& alphas,
                                             const std::filesystem::path& out = {}, int jobs = 1) {
  std::vector<AlphaRun> runs(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), jobs, [&](int i) {
    RunConfig c = base;
    c.alpha = alphas[i];
    RunOutcome o = run_with_output(c, subdir(out, alpha_label(c.alpha)));
    runs[i].alpha = c.alpha;
    runs[i].pinched = o.result.pinched;
    runs[i].t_pinch = o.result.t_pinch;
    runs[i].records = std::move(o.records);
  });
  return runs;
}

// ---- first versus second order in time ----

struct OrderRow {
  double tau = 0.0;
  Scheme scheme = Scheme::Euler;
  double E1 = 0.0;  // max relative squared L2 error
  double cpu_s = 0.0;
  bool pinched = false;
};

inline std::vector<OrderRow> run_order_comparison(RunConfig base, const std::vector<double>& taus,
                                                  const std::filesystem::path& out = {}, int jobs = 1) {
  base.surface = InitialSurface::Sphere;
  std::vector<OrderRow> rows(2 * taus.size());
  parallel_for(static_cast<int>(rows.size()), jobs, [&](int i) {
    RunConfig c = base;
    c.tau = taus[i / 2];
    c.scheme = (i % 2 == 0) ? Scheme::Euler : Scheme::Midpoint;
    char name[64];
    std::snprintf(name, sizeof name, "%s_tau_%g", to_string(c.scheme), c.tau);
    const RunOutcome o = run_with_output(c, subdir(out, name));
    rows[i] = {c.tau, c.scheme, o.result.errors.E1, o.result.cpu_s, o.result.pinched};
  });
  if (!out.empty()) {
    std::ofstream f = open_output(out / "order_compare.csv");
    f << "tau,scheme,E1,cpu_s\n";
    for (const auto& r : rows) {
      f << format_fixed(r.tau) << ',' << to_string(r.scheme) << ',' << format_fixed(r.E1) << ','
        << format_fixed(r.cpu_s) << '\n';
    }
  }
  return rows;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidSequence, "need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace pmcf

#endif  // PMCF_EXPERIMENTS_HPP
