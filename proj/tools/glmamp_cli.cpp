#include "glmamp/harness.hpp"
#include "glmamp/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

using namespace glmamp;

namespace {

struct Overrides {
  std::string config, deltas, algorithms, out, spectrum, model, law;
  std::string dumpCumulants, dumpSpectrum;
  std::optional<std::uint64_t> seed;
  std::optional<int> d, trials, workers;
  bool oracleSign = false, timing = false;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.d) cfg.d = *o.d;
  if (o.trials) cfg.trials = *o.trials;
  if (o.workers) cfg.workers = *o.workers;
  if (!o.deltas.empty()) cfg.set("delta", o.deltas);
  if (!o.algorithms.empty()) cfg.set("algorithms", o.algorithms);
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.spectrum.empty()) cfg.spectrum = o.spectrum;
  if (!o.model.empty()) cfg.model = o.model;
  if (!o.law.empty()) cfg.law = o.law;
  if (o.oracleSign) cfg.oracleSign = true;
  if (o.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

// Trial 0 of every delta, regenerated from its own stream.
void dump_trial_data(const ExperimentConfig& cfg, const Overrides& o) {
  if (!o.dumpCumulants.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t di = 0; di < cfg.deltaGrid.size(); ++di) {
      Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(di), 0}));
      TrialData td = sample_trial(cfg, cfg.deltaGrid[di], rng);
      arr.push_back({{"delta", cfg.deltaGrid[di]}, {"cumulants", nlohmann::json::parse(td.cumulants.to_json())}});
    }
    std::ofstream os(o.dumpCumulants);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + o.dumpCumulants);
    os << std::setw(2) << arr << '\n';
  }
  if (!o.dumpSpectrum.empty()) {
    std::vector<SpectrumSummary> rows;
    for (std::size_t di = 0; di < cfg.deltaGrid.size(); ++di) {
      try {
        rows.push_back(spectrum_summary(cfg, static_cast<int>(di)));
      } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rows.push_back({cfg.deltaGrid[di], nan, nan, nan, nan, nan, nan});
        std::cerr << "spectrum at delta " << cfg.deltaGrid[di] << ": " << e.what() << '\n';
      }
    }
    emit_spectrum_csv(rows, o.dumpSpectrum);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral estimators and Bayes-GVAMP for GLMs with orthogonally invariant designs"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "key = value config file");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--delta", o.deltas, "comma separated delta grid");
  app.add_option("--d", o.d, "signal dimension");
  app.add_option("--trials", o.trials, "trials per delta");
  app.add_option("--algorithms", o.algorithms, "subset of spec,spec-conj,amp,gd");
  app.add_option("--out", o.out, "output CSV path");
  app.add_option("--spectrum", o.spectrum, "limiting|empirical");
  app.add_option("--model", o.model, "phase-retrieval|poisson");
  app.add_option("--law", o.law, "uniform12|beta12|beta31|mp|cdp-binary|cdp-ternary");
  app.add_option("--workers", o.workers, "worker threads");
  app.add_flag("--oracle-sign", o.oracleSign, "fix the initialization sign from beta*");
  app.add_flag("--timing", o.timing, "record wall time per trial");
  app.add_option("--dump-cumulants", o.dumpCumulants, "write cumulants of trial 0 per delta as JSON");
  app.add_option("--dump-spectrum", o.dumpSpectrum, "write lambda1, lambda2, lambdaCirc, kappa2, eta, overlap of trial 0 per delta");

  auto* run = app.add_subcommand("run", "Monte Carlo experiment over the delta grid");
  auto* theory = app.add_subcommand("theory", "eta, delta*, bulk edge and SE overlap per delta");
  int gridPoints = 2000;
  auto* replica = app.add_subcommand("replica-scan", "F(v) on a grid and its fixed points");
  replica->add_option("--grid", gridPoints, "grid points in (0, rho)");
  auto* trace = app.add_subcommand("trace", "single Bayes-GVAMP run with per-iteration CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = resolve(o);
    if (run->parsed()) {
      dump_trial_data(cfg, o);
      auto records = run_experiment(cfg);
      emit_csv(records, cfg.out);
      emit_status_csv(records, cfg.out + ".status.csv");
      int failed = 0;
      for (const auto& r : records) failed += r.status != "ok";
      std::cout << records.size() << " records written to " << cfg.out;
      if (failed) std::cout << " (" << failed << " with errors, see " << cfg.out << ".status.csv)";
      std::cout << '\n';
    } else if (theory->parsed()) {
      std::vector<TheoryRow> rows;
      for (double delta : cfg.deltaGrid) rows.push_back(theory_row(cfg, delta));
      emit_theory_csv(rows, cfg.out);
      if (!o.dumpCumulants.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (double delta : cfg.deltaGrid)
          arr.push_back({{"delta", delta},
                         {"cumulants", nlohmann::json::parse(
                                           limiting_cumulants(SpectralLaw::from_tag(cfg.law, delta)).to_json())}});
        std::ofstream os(o.dumpCumulants);
        os << std::setw(2) << arr << '\n';
      }
      std::cout << rows.size() << " theory rows written to " << cfg.out << '\n';
    } else if (replica->parsed()) {
      std::string fixed = cfg.out + ".fixed.csv";
      auto res = replica_scan(cfg, cfg.deltaGrid.front(), gridPoints);
      emit_replica_csv(res, cfg.out, fixed);
      std::cout << res.scan.fixedPoints.size() << " fixed points written to " << fixed << '\n';
    } else if (trace->parsed()) {
      dump_trial_data(cfg, o);
      const double delta = cfg.deltaGrid.front();
      Rng rng(derive_seed(cfg.seed, {0, 0}));
      TrialData td = sample_trial(cfg, delta, rng);
      GaussianPrior prior(cfg.rho);
      SpectralTheory th = spectral_theory(td.cumulants, delta, td.model.gbar_moments(), cfg.rho);
      auto spec = build_D(td.design, td.y, td.model, optimal_preprocess(td.model, td.cumulants, delta));
      Vec gbarValues(td.y.size());
      for (Eigen::Index i = 0; i < td.y.size(); ++i) gbarValues[i] = td.model.gbar(td.y[i]);
      auto res = run_bayes_gvamp_auto(td.design, td.y, td.model, prior, limiting_spectrum(td.law), th, gbarValues,
                                      spec.v1, cfg.ampMaxIter, cfg.ampTol, &td.beta, cfg.oracleSign);
      emit_trace_csv(res.trace, cfg.out);
      std::cout << res.iterations << " iterations written to " << cfg.out << ", final overlap "
                << overlap(res.estimate, td.beta) << '\n';
    }
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << '\n';
    for (const auto& s : e.trace())
      std::cerr << "  t=" << s.t << " gamma1=" << s.gamma1 << " tau1=" << s.tau1 << " gamma2=" << s.gamma2
                << " tau2=" << s.tau2 << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
