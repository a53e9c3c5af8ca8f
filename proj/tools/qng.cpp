// qng: threshold curves, witness decisions and emitter-source sweeps.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qng/config_io.hpp"
#include "qng/gaussian_state.hpp"
#include "qng/result_table.hpp"
#include "qng/sweeps.hpp"

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

struct OutputArgs {
  std::string path;
  std::string format = "csv";
};

void add_output_options(CLI::App* cmd, OutputArgs& out) {
  cmd->add_option("--out", out.path, "Output file (stdout when omitted)");
  cmd->add_option("--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

qng::SourceMode parse_mode(const std::string& text) {
  if (text == "ideal") return qng::SourceMode::ideal;
  if (text == "noisy") return qng::SourceMode::noisy;
  if (text == "escape") return qng::SourceMode::escape;
  throw qng::UsageError("unknown mode '" + text + "'");
}

qng::DetectorConfig detector_or_default(const std::string& path, int order) {
  if (path.empty()) return qng::DetectorConfig::symmetric(order + 1);
  return qng::load_detector_config(path);
}

void emit(const std::vector<qng::ResultTable>& tables, const OutputArgs& out) {
  qng::write_tables(tables, qng::parse_output_format(out.format), out.path, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum non-Gaussianity criteria for multi-channel click detectors"};
  app.set_version_flag("--version", std::string(qng::kToolVersion));
  app.require_subcommand(1);

  // threshold
  qng::ThresholdRun threshold;
  std::string threshold_detector;
  OutputArgs threshold_out;
  auto* threshold_cmd = app.add_subcommand("threshold", "Gaussian boundary curve F_n(a)");
  threshold_cmd->add_option("--order", threshold.order, "Criterion order n")->required();
  threshold_cmd->add_option("--detector", threshold_detector, "Detector JSON (default: balanced n+1 channels)");
  threshold_cmd->add_option("--a-min", threshold.a_min, "Most negative a");
  threshold_cmd->add_option("--a-max", threshold.a_max, "Least negative a");
  threshold_cmd->add_option("--points", threshold.points, "Log-spaced grid points");
  threshold_cmd->add_option("--seed", threshold.seed, "Multistart jitter seed (0 = plain grid)");
  add_output_options(threshold_cmd, threshold_out);

  // witness
  qng::WitnessRun witness;
  double rn = 0.0;
  double rnp1 = 0.0;
  std::string witness_ensemble;
  std::string witness_detector;
  std::string witness_mode = "noisy";
  OutputArgs witness_out;
  auto* witness_cmd = app.add_subcommand("witness", "Decide QNG from click statistics");
  witness_cmd->add_option("--order", witness.order, "Criterion order n")->required();
  auto* rn_opt = witness_cmd->add_option("--rn", rn, "Success probability R_n");
  auto* rnp1_opt = witness_cmd->add_option("--rnp1", rnp1, "Error probability R_{n+1}");
  auto* ens_opt = witness_cmd->add_option("--ensemble", witness_ensemble, "Ensemble JSON");
  rn_opt->needs(rnp1_opt);
  rnp1_opt->needs(rn_opt);
  ens_opt->excludes(rn_opt)->excludes(rnp1_opt);
  witness_cmd->add_option("--mode", witness_mode, "ideal, noisy or escape")
      ->check(CLI::IsMember({"ideal", "noisy", "escape"}));
  witness_cmd->add_option("--detector", witness_detector, "Detector JSON (default: balanced)");
  witness_cmd->add_option("--seed", witness.seed, "Multistart jitter seed");
  add_output_options(witness_cmd, witness_out);

  // source
  std::string source_ensemble;
  std::string source_mode = "noisy";
  std::vector<int> source_orders;
  OutputArgs source_out;
  auto* source_cmd = app.add_subcommand("source", "Click statistics of an emitter ensemble");
  source_cmd->add_option("--ensemble", source_ensemble, "Ensemble JSON")->required();
  source_cmd->add_option("--orders", source_orders, "Criterion orders (default: m)")->delimiter(',');
  source_cmd->add_option("--mode", source_mode, "ideal, noisy or escape")
      ->check(CLI::IsMember({"ideal", "noisy", "escape"}));
  add_output_options(source_cmd, source_out);

  // sweep
  std::string sweep_kind;
  std::string sweep_ensemble;
  std::string sweep_grid;
  qng::SweepRun sweep;
  OutputArgs sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Threshold searches over an emitter-noise grid");
  sweep_cmd->add_option("kind", sweep_kind, "eta, noise, loss or duration")
      ->required()
      ->check(CLI::IsMember({"eta", "noise", "loss", "duration"}));
  sweep_cmd->add_option("--ensemble", sweep_ensemble, "Ensemble JSON")->required();
  sweep_cmd->add_option("--grid", sweep_grid, "nbar grid: start:stop:count, log:start:stop:count or a,b,c");
  sweep_cmd->add_option("--emitters", sweep.emitters, "Emitter counts (default: m from the file)")
      ->delimiter(',');
  sweep_cmd->add_option("--orders", sweep.orders, "Criterion orders (eta: required; others: default m)")
      ->delimiter(',');
  sweep_cmd->add_option("--seed", sweep.seed, "Multistart jitter seed");
  add_output_options(sweep_cmd, sweep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*threshold_cmd) {
      threshold.detector = detector_or_default(threshold_detector, threshold.order);
      emit(qng::run_threshold(threshold), threshold_out);
    } else if (*witness_cmd) {
      witness.detector = detector_or_default(witness_detector, witness.order);
      witness.mode = parse_mode(witness_mode);
      if (*rn_opt) {
        witness.success = rn;
        witness.error = rnp1;
      } else if (*ens_opt) {
        witness.ensemble = qng::load_ensemble(witness_ensemble);
      } else {
        throw qng::UsageError("give either --rn and --rnp1 or --ensemble");
      }
      emit({qng::run_witness(witness)}, witness_out);
    } else if (*source_cmd) {
      const qng::EnsembleParams ensemble = qng::load_ensemble(source_ensemble);
      const qng::SourceMode mode = parse_mode(source_mode);
      if (source_orders.empty()) source_orders = {ensemble.emitters};
      qng::ResultTable t{"source", {"n", "success", "error"}, {},
                         {{"command", "source"},
                          {"ensemble", qng::to_json(ensemble).dump()},
                          {"mode", source_mode}}};
      for (int n : source_orders) {
        if (n < 1) throw qng::UsageError("criterion orders must be positive");
        const qng::ClickProbabilities c = qng::source_click_stats(ensemble, n, mode);
        t.add_row({double(n), c.success, c.error});
      }
      emit({t}, source_out);
    } else if (*sweep_cmd) {
      sweep.kind = qng::parse_sweep_kind(sweep_kind);
      sweep.ensemble = qng::load_ensemble(sweep_ensemble);
      if (!sweep_grid.empty()) sweep.grid = qng::GridSpec::parse(sweep_grid);
      emit({qng::run_sweep(sweep)}, sweep_out);
    }
  } catch (const qng::UsageError& e) {
    std::cerr << "qng: " << e.what() << '\n';
    return kExitUsage;
  } catch (const qng::ConfigError& e) {
    std::cerr << "qng: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qng: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "qng: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qng: " << e.what() << '\n';
    return kExitComputation;
  }
  return 0;
}
