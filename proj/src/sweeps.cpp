#include "qng/sweeps.hpp"

#include <cmath>
#include <sstream>

#include "qng/config_io.hpp"
#include "qng/hermite.hpp"

namespace qng {

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

double status_code(ThresholdSearch::Outcome o) {
  switch (o) {
    case ThresholdSearch::Outcome::crossing:
      return 0.0;
    case ThresholdSearch::Outcome::always_witnessed:
      return 1.0;
    case ThresholdSearch::Outcome::never_witnessed:
      break;
  }
  return -1.0;
}

WitnessOptions witness_options(std::uint64_t seed) {
  WitnessOptions o;
  o.optimizer.seed = seed;
  return o;
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  if (text.find(':') == std::string::npos) {
    for (const std::string& item : split(text, ',')) g.explicit_values.push_back(parse_number(item));
    if (g.explicit_values.empty()) throw UsageError("empty grid");
    g.count = static_cast<int>(g.explicit_values.size());
    g.start = g.explicit_values.front();
    g.stop = g.explicit_values.back();
    return g;
  }
  std::vector<std::string> parts = split(text, ':');
  if (!parts.empty() && parts.front() == "log") {
    g.logarithmic = true;
    parts.erase(parts.begin());
  }
  if (parts.size() != 3) throw UsageError("grid must read start:stop:count, got '" + text + "'");
  g.start = parse_number(parts[0]);
  g.stop = parse_number(parts[1]);
  const double count = parse_number(parts[2]);
  if (count < 1 || count != std::floor(count)) throw UsageError("grid count must be a positive integer");
  g.count = static_cast<int>(count);
  if (g.start > g.stop) throw UsageError("grid start exceeds stop in '" + text + "'");
  if (g.logarithmic && !(g.start > 0.0)) throw UsageError("log grid needs positive bounds");
  return g;
}

std::vector<double> GridSpec::values() const {
  if (!explicit_values.empty()) return explicit_values;
  if (count == 1) return {start};
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    const double w = static_cast<double>(i) / (count - 1);
    v[i] = logarithmic ? std::exp(std::log(start) + w * (std::log(stop) - std::log(start)))
                       : start + w * (stop - start);
  }
  v.front() = start;
  v.back() = stop;
  return v;
}

std::string GridSpec::describe() const {
  if (!explicit_values.empty()) {
    std::string out;
    for (std::size_t i = 0; i < explicit_values.size(); ++i) {
      out += (i ? "," : "") + format_number(explicit_values[i]);
    }
    return out;
  }
  return std::string(logarithmic ? "log:" : "") + format_number(start) + ":" + format_number(stop) +
         ":" + std::to_string(count);
}

std::vector<ResultTable> run_threshold(const ThresholdRun& run) {
  if (run.order < 1) throw UsageError("--order must be at least 1");
  if (run.detector.channels() != run.order + 1) {
    throw UsageError("detector must have order + 1 channels");
  }
  if (run.points < 1) throw UsageError("--points must be positive");
  if (!(run.a_min < 0.0 && run.a_max < 0.0)) throw UsageError("a grid must be negative");
  if (run.a_min > run.a_max) throw UsageError("--a-min exceeds --a-max");

  const std::vector<double> grid = log_a_grid(run.a_min, run.a_max, run.points);
  OptimizerOptions opt;
  opt.seed = run.seed;
  const std::vector<FunctionalMaximum> maxima = maximize_over_grid(run.order, grid, run.detector, opt);

  std::vector<std::pair<std::string, std::string>> meta = {
      {"command", "threshold"},
      {"order", std::to_string(run.order)},
      {"detector", to_json(run.detector).dump()},
      {"a_min", format_number(run.a_min)},
      {"a_max", format_number(run.a_max)},
      {"points", std::to_string(run.points)},
      {"seed", std::to_string(run.seed)},
  };

  ResultTable curve{"threshold", {"a", "error", "success_bound", "amp", "angle", "min_var"}, {}, meta};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FunctionalMaximum& m = maxima[i];
    if (!m.converged) {
      throw ComputationError("optimizer still improving at the expanded boundary for a = " +
                             format_number(grid[i]));
    }
    curve.add_row({grid[i], m.error, m.success, m.argmax.amp, m.argmax.angle, m.argmax.min_var});
  }

  ResultTable asymptote{"asymptote", {"error", "success_asymptote"}, {}, meta};
  const double root = asymptote_hermite_root(run.order);
  asymptote.metadata.emplace_back("hermite_root", format_number(root));
  asymptote.metadata.emplace_back("coefficient", format_number(approx_threshold_coefficient(run.order)));
  for (const FunctionalMaximum& m : maxima) {
    if (m.error > 0.0) asymptote.add_row({m.error, asymptotic_success_bound(run.order, m.error)});
  }
  return {curve, asymptote};
}

ResultTable run_witness(const WitnessRun& run) {
  if (run.order < 1) throw UsageError("--order must be at least 1");
  if (run.detector.channels() != run.order + 1) {
    throw UsageError("detector must have order + 1 channels");
  }
  const bool explicit_stats = run.success.has_value() || run.error.has_value();
  if (explicit_stats == run.ensemble.has_value()) {
    throw UsageError("give either --rn and --rnp1 or --ensemble");
  }

  ClickProbabilities stats;
  std::vector<std::pair<std::string, std::string>> meta = {
      {"command", "witness"},
      {"order", std::to_string(run.order)},
      {"detector", to_json(run.detector).dump()},
      {"seed", std::to_string(run.seed)},
  };
  if (explicit_stats) {
    if (!run.success || !run.error) throw UsageError("--rn and --rnp1 must be given together");
    if (!(*run.success >= 0.0 && *run.success <= 1.0 && *run.error >= 0.0 && *run.error <= 1.0)) {
      throw UsageError("click probabilities must lie in [0, 1]");
    }
    stats = {run.order, *run.success, *run.error};
  } else {
    if (!run.detector.is_symmetric()) {
      throw UsageError("ensemble sources are modelled on symmetric detectors only");
    }
    stats = source_click_stats(*run.ensemble, run.order, run.mode);
    meta.emplace_back("ensemble", to_json(*run.ensemble).dump());
    meta.emplace_back("mode", run.mode == SourceMode::ideal   ? "ideal"
                              : run.mode == SourceMode::noisy ? "noisy"
                                                              : "escape");
  }

  const WitnessResult w = witness(stats, run.order, run.detector, witness_options(run.seed));
  ResultTable t{"witness", {"witnessed", "margin", "best_a", "threshold_success", "success", "error"},
                {}, meta};
  t.add_row({w.witnessed ? 1.0 : 0.0, w.margin, w.best_a, w.threshold_success, stats.success,
             stats.error});
  return t;
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "eta") return SweepKind::eta;
  if (text == "noise") return SweepKind::noise;
  if (text == "loss") return SweepKind::loss;
  if (text == "duration") return SweepKind::duration;
  throw UsageError("unknown sweep '" + text + "' (expected eta, noise, loss or duration)");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::eta:
      return "eta";
    case SweepKind::noise:
      return "noise";
    case SweepKind::loss:
      return "loss";
    case SweepKind::duration:
      return "duration";
  }
  return "?";
}

ResultTable run_sweep(const SweepRun& run) {
  const EnsembleParams& base = run.ensemble;
  base.validate();
  const std::vector<int> emitters = run.emitters.empty() ? std::vector<int>{base.emitters} : run.emitters;
  const std::vector<double> noise =
      run.grid ? run.grid->values() : std::vector<double>{base.noise_mean};
  for (int m : emitters) {
    if (m < 1) throw UsageError("emitter counts must be positive");
  }
  for (int n : run.orders) {
    if (n < 1) throw UsageError("criterion orders must be positive");
  }
  for (double nb : noise) {
    if (!(nb >= 0.0)) throw UsageError("noise grid must be nonnegative");
  }
  if (run.kind == SweepKind::eta && run.orders.empty()) {
    throw UsageError("the eta sweep needs --orders");
  }
  if (run.kind != SweepKind::eta && !run.orders.empty() && run.orders.size() != 1) {
    throw UsageError("noise, loss and duration sweeps take a single order");
  }
  if (run.kind == SweepKind::duration && !std::isfinite(base.storage_time)) {
    throw UsageError("the duration sweep needs a finite tau_s");
  }
  if ((run.kind == SweepKind::loss || run.kind == SweepKind::duration) && !(base.efficiency > 0.0)) {
    throw UsageError("loss and duration sweeps need eta > 0");
  }

  struct Job {
    int m;
    int n;
    double nbar;
  };
  std::vector<Job> jobs;
  for (int m : emitters) {
    const std::vector<int> orders =
        run.kind == SweepKind::eta ? run.orders
                                   : std::vector<int>{run.orders.empty() ? m : run.orders.front()};
    for (int n : orders) {
      for (double nb : noise) jobs.push_back({m, n, nb});
    }
  }

  SearchOptions search;
  search.witness = witness_options(run.seed);
  search.witness.optimizer.execution = Execution::serial;
  SearchOptions duration = duration_search_defaults();
  duration.witness = search.witness;

  std::vector<std::vector<double>> rows(jobs.size());
  for_each_index(Execution::parallel, jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    switch (run.kind) {
      case SweepKind::eta: {
        const ThresholdSearch s = min_detectable_efficiency(j.m, j.n, j.nbar, search);
        rows[i] = {double(j.m), double(j.n), j.nbar, s.value, status_code(s.outcome)};
        break;
      }
      case SweepKind::noise: {
        const ThresholdSearch s = min_detectable_efficiency(j.m, j.n, j.nbar, search);
        rows[i] = {double(j.m), double(j.n), j.nbar, s.value, status_code(s.outcome),
                   min_efficiency_analytic(j.m, j.nbar)};
        break;
      }
      case SweepKind::loss: {
        const ThresholdSearch s = max_tolerated_loss(j.m, base.efficiency, j.nbar, j.n, search);
        rows[i] = {double(j.m), double(j.n), base.efficiency, j.nbar, s.value, status_code(s.outcome),
                   loss_tolerance_analytic(j.m, base.efficiency, j.nbar)};
        break;
      }
      case SweepKind::duration: {
        const ThresholdSearch s =
            max_measurement_duration(j.m, base.efficiency, j.nbar, base.storage_time, j.n, duration);
        const DurationBound b = max_duration_analytic(j.m, base.efficiency, j.nbar, base.storage_time);
        rows[i] = {double(j.m),
                   double(j.n),
                   base.efficiency,
                   j.nbar,
                   base.storage_time,
                   s.value / base.storage_time,
                   status_code(s.outcome),
                   b.detectable ? b.max_window / base.storage_time : std::nan("")};
        break;
      }
    }
  });

  ResultTable t;
  t.name = "sweep-" + to_string(run.kind);
  switch (run.kind) {
    case SweepKind::eta:
      t.columns = {"m", "n", "nbar", "eta_star", "status"};
      break;
    case SweepKind::noise:
      t.columns = {"m", "n", "nbar", "eta_star", "status", "eta_analytic"};
      break;
    case SweepKind::loss:
      t.columns = {"m", "n", "eta", "nbar", "T_star", "status", "T_analytic"};
      break;
    case SweepKind::duration:
      t.columns = {"m", "n", "eta", "nbar", "tau_s", "tM_star_over_tau", "status",
                   "tM_analytic_over_tau"};
      break;
  }
  t.metadata = {{"command", "sweep " + to_string(run.kind)},
                {"ensemble", to_json(base).dump()},
                {"grid", run.grid ? run.grid->describe() : format_number(base.noise_mean)},
                {"emitters", join_ints(emitters)},
                {"orders", run.orders.empty() ? std::string("m") : join_ints(run.orders)},
                {"seed", std::to_string(run.seed)}};
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

}  // namespace qng
