// Acceptance criteria. Prints one PASS/FAIL line per criterion; exits
// nonzero if any selected criterion fails. Usage: qng_acceptance [N ...]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qng/criteria.hpp"
#include "qng/detector.hpp"
#include "qng/emitter.hpp"
#include "qng/gaussian_state.hpp"
#include "qng/hermite.hpp"

using namespace qng;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel_dev(double value, double reference) { return std::abs(value / reference - 1.0); }

Outcome oracle_equivalence() {
  int count = 0;
  double worst = 0.0;
  for (int i = 0; i <= 8; ++i) {
    const double amp = 0.5 * i;
    for (int j = 0; j <= 4; ++j) {
      const double angle = j * std::numbers::pi / 8;
      for (double v : {0.05, 0.25, 0.6, 1.0}) {
        for (double t : {0.0, 0.3, 0.7, 1.0}) {
          const SqueezedCoherentParams s{amp, angle, v};
          worst = std::max(worst, std::abs(no_click_expectation(s, t) - no_click_oracle(s, t)));
          ++count;
        }
      }
    }
  }
  return {count >= 500 && worst <= 1e-10,
          std::to_string(count) + " points, max |closed form - Fock| = " + fmt("%.2e", worst)};
}

Outcome inclusion_exclusion() {
  double worst = 0.0;
  int cases = 0;
  for (int channels = 1; channels <= 6; ++channels) {
    std::vector<double> split(channels);
    std::vector<double> eff(channels);
    double total = 0.0;
    for (int i = 0; i < channels; ++i) {
      split[i] = 1.0 + 0.5 * ((i * 7) % 5);
      eff[i] = 1.0 - 0.08 * i;
      total += split[i];
    }
    double partial = 0.0;
    for (int i = 0; i < channels - 1; ++i) partial += (split[i] /= total);
    split.back() = 1.0 - partial;
    for (const DetectorConfig& config : {DetectorConfig::symmetric(channels), DetectorConfig(split, eff)}) {
      for (double amp : {0.05, 0.5, 1.0, 2.0, 3.0}) {
        const NoClickProfile profile = gaussian_no_click_profile(SqueezedCoherentParams::coherent(amp), config);
        for (int k = 1; k <= channels; ++k) {
          double product = 1.0;
          for (int c = 0; c < k; ++c) product *= -std::expm1(-config.channel_transmission(c) * amp * amp);
          worst = std::max(worst, std::abs(click_success(profile, k) - product));
          ++cases;
        }
      }
    }
  }
  return {worst <= 1e-12, std::to_string(cases) + " cases, max deviation " + fmt("%.2e", worst)};
}

Outcome multiphoton_cutoff() {
  double worst = 0.0;
  for (int m = 1; m <= 6; ++m) {
    for (double eta : {0.1, 0.3, 0.9}) {
      EnsembleParams p;
      p.emitters = m;
      p.efficiency = eta;
      worst = std::max(worst, std::abs(source_click_stats(p, m, SourceMode::ideal).error));
    }
  }
  return {worst <= 1e-12, "max |R_{m+1}| = " + fmt("%.2e", worst)};
}

Outcome gaussian_soundness() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> amp(0.0, 3.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  std::uniform_real_distribution<double> log_var(std::log(1e-2), 0.0);
  int witnessed = 0;
  double largest = -1.0;
  for (int n = 1; n <= 3; ++n) {
    const DetectorConfig config = DetectorConfig::symmetric(n + 1);
    for (int i = 0; i < 100; ++i) {
      const SqueezedCoherentParams s{amp(rng), angle(rng), std::exp(log_var(rng))};
      const ClickProbabilities c = gaussian_click_stats(s, config, n);
      const WitnessResult w = witness(c, n, config);
      if (w.witnessed) ++witnessed;
      if (c.success > 0) largest = std::max(largest, w.margin / c.success);
    }
  }
  return {witnessed == 0, "300 states, " + std::to_string(witnessed) + " witnessed, max margin/R_n = " +
                              fmt("%.2e", largest)};
}

Outcome asymptote_convergence() {
  bool pass = true;
  std::string detail;
  const std::vector<double> grid = log_a_grid(-1e9, -1e1, 160);
  for (int n = 1; n <= 3; ++n) {
    const ThresholdCurve curve = threshold_curve(n, grid);
    double worst = 0.0;
    double worst_error = 0.0;
    const ThresholdPoint* witness_point = nullptr;
    for (const ThresholdPoint& p : curve.points) {
      if (p.error <= 0.0 || p.error > 1e-6) continue;
      const double d = rel_dev(p.success_bound, asymptotic_success_bound(n, p.error));
      if (d > worst) {
        worst = d;
        worst_error = p.error;
        witness_point = &p;
      }
    }
    const double at = rel_dev(curve.success_bound_at(1e-6), asymptotic_success_bound(n, 1e-6));
    const bool ok = worst <= 0.05 && at <= 0.05;
    pass = pass && ok;
    detail += "n=" + std::to_string(n) + ": dev at 1e-6 " + fmt("%.2f%%", 100 * at) + ", max " +
              fmt("%.2f%%", 100 * worst) + " at error " + fmt("%.2e", worst_error);
    if (!ok && witness_point) {
      // the curve point is attained by an explicit state; recheck it by the Fock oracle
      const SqueezedCoherentParams& s = witness_point->optimal_state;
      const NoClickProfile fock = NoClickProfile::by_size(
          n + 1, [&](int k) { return 1.0 - no_click_oracle(s, static_cast<double>(k) / (n + 1)); });
      const ClickProbabilities c = click_stats(fock, n);
      detail += fmt(" [state amp=%.4g", s.amp) + fmt(" V=%.4g", s.min_var) + fmt(": Fock R_n=%.5e", c.success) +
                fmt(" R_n+1=%.5e", c.error) + fmt(" asymptote R_n=%.5e]", asymptotic_success_bound(n, c.error));
    }
    detail += "; ";
  }
  const bool c1 = std::abs(approx_threshold_coefficient(1) - 0.25) <= 1e-15;
  detail += c1 ? "C_1 = 1/4" : "C_1 != 1/4";
  return {pass && c1, detail};
}

Outcome order_structure() {
  bool pass = true;
  std::string detail;
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= m; ++n) {
      const GaussianBound& bound = cached_gaussian_bound(n, DetectorConfig::symmetric(n + 1));
      if (n == m) {
        bool all = true;
        for (double eta : {1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.5, 1.0}) {
          EnsembleParams p;
          p.emitters = m;
          p.efficiency = eta;
          all = all && bound.witness(source_click_stats(p, n, SourceMode::noisy)).witnessed;
        }
        pass = pass && all;
        detail += "m=n=" + std::to_string(m) + (all ? " all" : " NOT all") + "; ";
      } else {
        const ThresholdSearch s = min_detectable_efficiency(m, n, 0.0);
        const bool ok = s.outcome == ThresholdSearch::Outcome::crossing && s.value > 0 && s.value < 1;
        pass = pass && ok;
        detail += "m=" + std::to_string(m) + ",n=" + std::to_string(n) + " eta*=" + fmt("%.4f", s.value) + "; ";
      }
    }
  }
  return {pass, detail};
}

Outcome analytic_consistency() {
  constexpr double kTolerance = 0.25;
  constexpr double kNoise = 1e-3;
  constexpr double kEta = 0.3;
  bool pass = true;
  std::string detail;
  for (int m = 1; m <= 3; ++m) {
    const ThresholdSearch e = min_detectable_efficiency(m, m, kNoise);
    const double ea = min_efficiency_analytic(m, kNoise);
    const ThresholdSearch t = max_tolerated_loss(m, kEta, kNoise, m);
    const double ta = loss_tolerance_analytic(m, kEta, kNoise);
    const ThresholdSearch d = max_measurement_duration(m, kEta, kNoise, 1.0, m, duration_search_defaults());
    const DurationBound da = max_duration_analytic(m, kEta, kNoise, 1.0);
    const bool ok_e = e.outcome == ThresholdSearch::Outcome::crossing && rel_dev(e.value, ea) <= kTolerance;
    const bool ok_t = t.outcome == ThresholdSearch::Outcome::crossing && rel_dev(t.value, ta) <= kTolerance;
    const bool ok_d = d.outcome == ThresholdSearch::Outcome::crossing && da.detectable &&
                      rel_dev(d.value, da.max_window) <= kTolerance;
    pass = pass && ok_e && ok_t && ok_d;
    detail += "m=" + std::to_string(m) + ": eta* " + fmt("%.4g", e.value) + " vs " + fmt("%.4g", ea) +
              (ok_e ? "" : " (out)") + ", T* " + fmt("%.4g", t.value) + " vs " + fmt("%.4g", ta) +
              (ok_t ? "" : " (out)") + ", tM*/tau " +
              (d.outcome == ThresholdSearch::Outcome::always_witnessed ? ">" : "") + fmt("%.4g", d.value) +
              " vs " + fmt("%.4g", da.max_window) + (ok_d ? "" : " (out)") + "; ";
  }
  return {pass, detail};
}

Outcome loss_above_half() {
  EnsembleParams p;
  p.emitters = 2;
  p.efficiency = 0.3;
  p.noise_mean = 1e-3;
  p.loss = 0.45;
  const ClickProbabilities c = source_click_stats(p, 2, SourceMode::noisy);
  const WitnessResult w = witness(c, 2, DetectorConfig::symmetric(3));
  return {w.witnessed, "m=2, eta=0.3, nbar=1e-3, T=0.45: R_2=" + fmt("%.4e", c.success) +
                           ", R_3=" + fmt("%.4e", c.error) + ", margin " + fmt("%.3e", w.margin)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qng_acceptance";
  fs::create_directories(dir);
  std::ofstream(dir / "ensemble.json") << R"({"m": 2, "eta": 0.3, "nbar": 0.001})";
  const std::vector<std::string> commands = {
      "threshold --order 2 --points 40 --seed 11 --format json --out ",
      "sweep loss --ensemble " + (dir / "ensemble.json").string() + " --grid 1e-3,2e-3 --seed 5 --out ",
  };
  bool pass = true;
  int index = 0;
  for (const std::string& c : commands) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / ("run" + std::to_string(index) + "_" + std::to_string(run) + ".out");
      fs::remove(out);
      const std::string cmd = std::string(QNG_CLI_PATH) + " " + c + out.string() + " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) pass = false;
      const std::string bytes = slurp(out);
      if (run == 0) first = bytes;
      if (bytes.empty() || bytes != first) pass = false;
    }
    ++index;
  }
  return {pass, "threshold and sweep runs repeated, outputs " + std::string(pass ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "closed-form vs Fock oracle, >=500 points, 1e-10", 10, oracle_equivalence},
      {2, "inclusion-exclusion vs channel product, N<=6, 1e-12", 1, inclusion_exclusion},
      {3, "ideal m emitters give R_{m+1}=0, m<=6", 1, multiphoton_cutoff},
      {4, "random Gaussian states not witnessed, n=1..3", 600, gaussian_soundness},
      {5, "threshold curve vs Hermite asymptote within 5% at error<=1e-6, n=1..3", 600,
       asymptote_convergence},
      {6, "nbar=0: n=m witnessed down to eta=1e-2, n<m has eta* in (0,1)", 600, order_structure},
      {7, "eta*, T*, tM* vs analytic bounds within 25%, m=1..3", 1800, analytic_consistency},
      {8, "witnessed at T=0.45 for m=2", 300, loss_above_half},
      {9, "repeated CLI runs are byte-identical", 600, cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s | %s | %.1fs of %.0fs%s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
