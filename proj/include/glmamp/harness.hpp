#pragma once

#include "glmamp/asymptotics.hpp"
#include "glmamp/baselines.hpp"
#include "glmamp/cumulants.hpp"
#include "glmamp/designs.hpp"
#include "glmamp/gvamp.hpp"
#include "glmamp/models.hpp"
#include "glmamp/spectral.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace glmamp {

struct ExperimentConfig {
  std::string model = "phase-retrieval";
  std::string law = "beta12";  // uniform12 | beta12 | beta31 | mp | cdp-binary | cdp-ternary
  int d = 500;
  std::vector<double> deltaGrid{2.0};
  int trials = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms{"spec", "spec-conj", "amp", "gd"};
  int ampMaxIter = 50;
  double ampTol = 1e-8;
  int quadDegree = 50;
  std::string spectrum = "limiting";  // limiting | empirical
  std::string out = "results.csv";
  bool oracleSign = false;
  double rho = 1.0;
  bool timing = false;
  int workers = 1;
  std::optional<double> gdLr;
  int gdSteps = 500;
  std::optional<std::string> gdModel, gdLoss;

  bool is_cdp() const { return law == "cdp-binary" || law == "cdp-ternary"; }
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

// Lines of `key = value`; `#` starts a comment; blank lines are ignored.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

struct TrialRecord {
  std::uint64_t seed = 0;
  double delta = 0;
  std::string algorithm;
  double overlap = 0;
  int iterations = 0;
  double wallTimeMs = 0;
  double theoryOverlap = 0;
  bool thresholdSatisfied = false;
  double lambda1 = 0, lambda2 = 0, lambdaCirc = 0;

  // Not part of the 11-column schema; written to the status sidecar.
  int deltaIndex = 0, trialIndex = 0;
  std::string status = "ok";
  std::string message;
};

bool operator==(const TrialRecord& a, const TrialRecord& b);

constexpr int kTrialColumns = 11;
std::string trial_csv_header();

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> read_csv(const std::string& path);
void emit_status_csv(const std::vector<TrialRecord>& records, const std::string& path);

// Model and law at one delta, with the variance sigma2 = kappa2 rho set from the spectrum.
struct TrialSetting {
  GlmModel model;
  SpectralLaw law;
  double delta = 0;
  int n = 0;
};
TrialSetting make_setting(const ExperimentConfig& cfg, double delta, double kappa2 = 1.0);

struct TrialData {
  Design design;
  Vec beta, z, y;
  GlmModel model;
  SpectralLaw law;
  CumulantSet cumulants;
};

TrialData sample_trial(const ExperimentConfig& cfg, double delta, Rng& rng);

// All requested algorithms on one (delta, trial) cell.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, int deltaIndex, int trialIndex);

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

struct TheoryRow {
  double delta = 0;
  double deltaStar = 0;
  SpectralTheory spectral;
  double seOverlap = 0;  // NaN when the threshold fails or SE leaves the domain
};

TheoryRow theory_row(const ExperimentConfig& cfg, double delta);
void emit_theory_csv(const std::vector<TheoryRow>& rows, const std::string& path);

// (lambda1, lambda2, lambdaCirc, kappa2, eta, overlap) of the optimal spectral estimator on trial 0.
struct SpectrumSummary {
  double delta = 0, lambda1 = 0, lambda2 = 0, lambdaCirc = 0, kappa2 = 0, eta = 0, overlap = 0;
};
SpectrumSummary spectrum_summary(const ExperimentConfig& cfg, int deltaIndex);
void emit_spectrum_csv(const std::vector<SpectrumSummary>& rows, const std::string& path);

void emit_trace_csv(const std::vector<BayesTraceRow>& rows, const std::string& path);

struct ReplicaScanResult {
  FScan scan;
  std::vector<bool> reachedBySe;
};

ReplicaScanResult replica_scan(const ExperimentConfig& cfg, double delta, int gridPoints = 2000);
void emit_replica_csv(const ReplicaScanResult& r, const std::string& gridPath, const std::string& fixedPath);

}  // namespace glmamp
