#include "glmamp/harness.hpp"

#include "glmamp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace glmamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Configuration, "key '" + key + "': not a number: '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != std::floor(x)) throw Error(ErrorKind::Configuration, "key '" + key + "': not an integer: '" + v + "'");
  return static_cast<long long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::Configuration, "key '" + key + "': not a boolean: '" + v + "'");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "model") model = v;
  else if (key == "law") law = v;
  else if (key == "d") d = static_cast<int>(to_int(key, v));
  else if (key == "delta") {
    deltaGrid.clear();
    for (const auto& s : split(v, ',')) deltaGrid.push_back(to_double(key, s));
  } else if (key == "trials") trials = static_cast<int>(to_int(key, v));
  else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "algorithms") algorithms = split(v, ',');
  else if (key == "amp.max_iter") ampMaxIter = static_cast<int>(to_int(key, v));
  else if (key == "amp.tol") ampTol = to_double(key, v);
  else if (key == "quad_degree") quadDegree = static_cast<int>(to_int(key, v));
  else if (key == "spectrum") spectrum = v;
  else if (key == "out") out = v;
  else if (key == "oracle_sign") oracleSign = to_bool(key, v);
  else if (key == "rho") rho = to_double(key, v);
  else if (key == "timing") timing = to_bool(key, v);
  else if (key == "workers") workers = static_cast<int>(to_int(key, v));
  else if (key == "gd.lr") gdLr = to_double(key, v);
  else if (key == "gd.steps") gdSteps = static_cast<int>(to_int(key, v));
  else if (key == "gd.model") gdModel = v;
  else if (key == "gd.loss") gdLoss = v;
  else throw Error(ErrorKind::Configuration, "unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::Configuration, m); };
  if (d < 16) bad("d must be >= 16");
  if (trials < 1) bad("trials must be >= 1");
  if (deltaGrid.empty()) bad("delta grid is empty");
  for (double x : deltaGrid)
    if (!(x > 0)) bad("delta grid entries must be > 0");
  if (model != "phase-retrieval" && model != "poisson") bad("model must be phase-retrieval or poisson");
  if (!is_cdp()) SpectralLaw::from_tag(law, 1.0);
  if (is_cdp()) {
    for (double x : deltaGrid)
      if (x != std::floor(x)) bad("coded diffraction designs need integer delta");
  }
  for (const auto& a : algorithms)
    if (a != "spec" && a != "spec-conj" && a != "amp" && a != "gd") bad("unknown algorithm '" + a + "'");
  if (ampMaxIter < 1) bad("amp.max_iter must be >= 1");
  if (ampTol < 0) bad("amp.tol must be >= 0");
  if (quadDegree < 2) bad("quad_degree must be >= 2");
  if (spectrum != "limiting" && spectrum != "empirical") bad("spectrum must be limiting or empirical");
  if (!(rho > 0)) bad("rho must be > 0");
  if (workers < 1) bad("workers must be >= 1");
  if (gdLr && !(*gdLr > 0)) bad("gd.lr must be > 0");
  if (gdSteps < 0) bad("gd.steps must be >= 0");
  if (gdModel) postulated_from_name(*gdModel);
  if (gdLoss) loss_from_name(*gdLoss);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream is(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Configuration, "line " + std::to_string(lineNo) + ": expected key = value");
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

bool operator==(const TrialRecord& a, const TrialRecord& b) {
  return a.seed == b.seed && same_double(a.delta, b.delta) && a.algorithm == b.algorithm &&
         same_double(a.overlap, b.overlap) && a.iterations == b.iterations &&
         same_double(a.wallTimeMs, b.wallTimeMs) && same_double(a.theoryOverlap, b.theoryOverlap) &&
         a.thresholdSatisfied == b.thresholdSatisfied && same_double(a.lambda1, b.lambda1) &&
         same_double(a.lambda2, b.lambda2) && same_double(a.lambdaCirc, b.lambdaCirc);
}

std::string trial_csv_header() {
  return "seed,delta,algorithm,overlap,iterations,wallTimeMs,theoryOverlap,thresholdSatisfied,lambda1,lambda2,"
         "lambdaCirc";
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << trial_csv_header() << '\n';
  for (const auto& r : records) {
    os << r.seed << ',' << fmt(r.delta) << ',' << r.algorithm << ',' << fmt(r.overlap) << ',' << r.iterations
       << ',' << fmt(r.wallTimeMs) << ',' << fmt(r.theoryOverlap) << ',' << (r.thresholdSatisfied ? 1 : 0) << ','
       << fmt(r.lambda1) << ',' << fmt(r.lambda2) << ',' << fmt(r.lambdaCirc) << '\n';
  }
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != trial_csv_header())
    throw Error(ErrorKind::Io, path + ": unexpected header");
  std::vector<TrialRecord> out;
  int lineNo = 1;
  while (std::getline(is, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream ls(line);
    while (std::getline(ls, item, ',')) f.push_back(item);
    if (static_cast<int>(f.size()) != kTrialColumns)
      throw Error(ErrorKind::Io, path + ":" + std::to_string(lineNo) + ": expected 11 columns");
    TrialRecord r;
    try {
      r.seed = std::stoull(f[0]);
      r.delta = std::stod(f[1]);
      r.algorithm = f[2];
      r.overlap = std::stod(f[3]);
      r.iterations = std::stoi(f[4]);
      r.wallTimeMs = std::stod(f[5]);
      r.theoryOverlap = std::stod(f[6]);
      r.thresholdSatisfied = f[7] == "1";
      r.lambda1 = std::stod(f[8]);
      r.lambda2 = std::stod(f[9]);
      r.lambdaCirc = std::stod(f[10]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, path + ":" + std::to_string(lineNo) + ": malformed field");
    }
    out.push_back(r);
  }
  return out;
}

void emit_status_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << "seed,delta,trial,algorithm,status,message\n";
  for (const auto& r : records) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '"', '\'');
    os << r.seed << ',' << fmt(r.delta) << ',' << r.trialIndex << ',' << r.algorithm << ',' << r.status << ",\""
       << msg << "\"\n";
  }
}

TrialSetting make_setting(const ExperimentConfig& cfg, double delta, double kappa2) {
  TrialSetting s;
  s.delta = delta;
  s.n = static_cast<int>(std::lround(delta * cfg.d));
  s.model = GlmModel::from_name(cfg.model, kappa2 * cfg.rho, cfg.quadDegree);
  if (!cfg.is_cdp()) s.law = SpectralLaw::from_tag(cfg.law, delta);
  return s;
}

TrialData sample_trial(const ExperimentConfig& cfg, double delta, Rng& rng) {
  TrialData td;
  TrialSetting s = make_setting(cfg, delta);
  if (!cfg.is_cdp()) {
    td.design = build_design(s.n, cfg.d, s.law, rng);
  } else {
    auto variant = cfg.law == "cdp-binary" ? CdpVariant::Binary : CdpVariant::Ternary;
    td.design = build_cdp_design(cfg.d, static_cast<int>(delta), variant, rng);
  }
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.rho));
  td.beta.resize(cfg.d);
  for (int i = 0; i < cfg.d; ++i) td.beta[i] = normal(rng);
  td.z = td.design.X * td.beta;
  if (!cfg.is_cdp() && cfg.spectrum == "limiting") {
    td.law = s.law;
    td.cumulants = limiting_cumulants(s.law);
  } else {
    td.law = SpectralLaw::empirical(td.design.squared_singular_values(), td.design.n, td.design.d);
    td.cumulants = empirical_cumulants(td.design);
  }
  td.model = GlmModel::from_name(cfg.model, td.cumulants.k2 * cfg.rho, cfg.quadDegree);
  td.y = td.model.sample(td.z, rng);
  return td;
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, int deltaIndex, int trialIndex) {
  const double delta = cfg.deltaGrid.at(deltaIndex);
  const std::uint64_t seed =
      derive_seed(cfg.seed, {static_cast<std::uint64_t>(deltaIndex), static_cast<std::uint64_t>(trialIndex)});
  Rng rng(seed);

  auto blank = [&](const std::string& algo) {
    TrialRecord r;
    r.seed = seed;
    r.delta = delta;
    r.algorithm = algo;
    r.overlap = r.theoryOverlap = r.lambda1 = r.lambda2 = r.lambdaCirc = kNaN;
    r.deltaIndex = deltaIndex;
    r.trialIndex = trialIndex;
    return r;
  };
  auto fail = [](TrialRecord& r, ErrorKind kind, const std::string& what) {
    r.status = to_string(kind);
    r.message = what;
    r.overlap = kNaN;
  };

  std::vector<TrialRecord> out;
  TrialData td;
  try {
    td = sample_trial(cfg, delta, rng);
  } catch (const Error& e) {
    for (const auto& a : cfg.algorithms) {
      out.push_back(blank(a));
      fail(out.back(), e.kind(), e.what());
    }
    return out;
  }

  const GbarMoments gm = td.model.gbar_moments();
  const GaussianPrior prior(cfg.rho);
  SpectralTheory th;
  std::string theoryError;
  ErrorKind theoryKind = ErrorKind::Configuration;
  try {
    th = spectral_theory(td.cumulants, delta, gm, cfg.rho);
  } catch (const Error& e) {
    theoryError = e.what();
    theoryKind = e.kind();
  }

  auto edge_for = [&](const Vec& t) {
    try {
      BulkEdge edge(limiting_spectrum(td.law), empirical_law(t));
      return edge.solve().lambdaCirc;
    } catch (const Error&) {
      return kNaN;
    }
  };

  std::optional<SpectralResult> specOpt, specConj;
  Vec gbarValues;
  auto spectral_opt = [&]() -> const SpectralResult& {
    if (!specOpt) {
      if (!theoryError.empty()) throw Error(theoryKind, theoryError);
      Preprocess pre = optimal_preprocess(td.model, td.cumulants, delta);
      specOpt = build_D(td.design, preprocess_responses(td.y, td.model, pre));
    }
    return *specOpt;
  };
  auto spectral_conj = [&]() -> const SpectralResult& {
    if (!specConj) specConj = build_D(td.design, preprocess_responses(td.y, td.model, conjectured_preprocess(td.model)));
    return *specConj;
  };

  using Clock = std::chrono::steady_clock;
  for (const auto& algo : cfg.algorithms) {
    TrialRecord r = blank(algo);
    r.thresholdSatisfied = th.thresholdSatisfied;
    auto start = Clock::now();
    try {
      if (algo == "spec") {
        const auto& s = spectral_opt();
        r.overlap = overlap(s.v1, td.beta);
        r.lambda1 = s.lambda1;
        r.lambda2 = s.lambda2;
        if (th.etaDefined) r.theoryOverlap = std::sqrt(th.eta);
        Preprocess pre = optimal_preprocess(td.model, td.cumulants, delta);
        r.lambdaCirc = edge_for(preprocess_responses(td.y, td.model, pre));
        r.iterations = 1;
      } else if (algo == "spec-conj") {
        const auto& s = spectral_conj();
        r.overlap = overlap(s.v1, td.beta);
        r.lambda1 = s.lambda1;
        r.lambda2 = s.lambda2;
        r.lambdaCirc = edge_for(preprocess_responses(td.y, td.model, conjectured_preprocess(td.model)));
        r.iterations = 1;
      } else if (algo == "amp") {
        const auto& s = spectral_opt();
        if (gbarValues.size() == 0) {
          gbarValues.resize(td.y.size());
          for (Eigen::Index i = 0; i < td.y.size(); ++i) gbarValues[i] = td.model.gbar(td.y[i]);
        }
        LimitingSpectrum law = limiting_spectrum(td.law);
        auto run = run_bayes_gvamp_auto(td.design, td.y, td.model, prior, law, th, gbarValues, s.v1, cfg.ampMaxIter,
                                        cfg.ampTol, &td.beta, cfg.oracleSign);
        r.overlap = overlap(run.estimate, td.beta);
        r.iterations = run.iterations;
        r.theoryOverlap = run.trace.back().overlapSe;
      } else if (algo == "gd") {
        const auto& s = spectral_conj();
        GdConfig gc = default_gd_config(td.model, cfg.law);
        if (cfg.gdLr) gc.learningRate = *cfg.gdLr;
        gc.steps = cfg.gdSteps;
        if (cfg.gdModel) gc.postulated = postulated_from_name(*cfg.gdModel);
        if (cfg.gdLoss) gc.loss = loss_from_name(*cfg.gdLoss);
        gc.init = std::sqrt(cfg.d * cfg.rho) * s.v1;
        auto res = run_gd(td.design, td.y, gc);
        r.overlap = overlap(res.theta, td.beta);
        r.iterations = res.steps;
      }
    } catch (const Error& e) {
      fail(r, e.kind(), e.what());
    }
    if (cfg.timing) r.wallTimeMs = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    out.push_back(r);
  }
  return out;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int cells = static_cast<int>(cfg.deltaGrid.size()) * cfg.trials;
  std::vector<std::vector<TrialRecord>> results(cells);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int k = next++; k < cells; k = next++) results[k] = run_trial(cfg, k / cfg.trials, k % cfg.trials);
  };
  const int nThreads = std::min(cfg.workers, cells);
  if (nThreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nThreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<TrialRecord> out;
  for (auto& cell : results)
    for (auto& r : cell) out.push_back(std::move(r));
  return out;
}

TheoryRow theory_row(const ExperimentConfig& cfg, double delta) {
  if (cfg.is_cdp()) throw Error(ErrorKind::Configuration, "theory needs a synthetic spectral law");
  TheoryRow row;
  row.delta = delta;
  row.seOverlap = kNaN;
  SpectralLaw law = SpectralLaw::from_tag(cfg.law, delta);
  CumulantSet c = limiting_cumulants(law);
  GlmModel model = GlmModel::from_name(cfg.model, c.k2 * cfg.rho, cfg.quadDegree);
  GbarMoments gm = model.gbar_moments();
  row.spectral = spectral_theory(c, delta, gm, cfg.rho);
  row.deltaStar = threshold_check(law, gm).deltaStar;
  row.spectral.deltaStar = row.deltaStar;
  LimitingSpectrum ls = limiting_spectrum(law);
  try {
    Preprocess pre = optimal_preprocess(model, c, delta);
    BulkEdge edge(ls, limiting_T_law(model, pre.shift()));
    EdgeResult e = edge.solve();
    row.spectral.lambdaCirc = e.lambdaCirc;
    row.spectral.aCirc = e.aCirc;
    row.spectral.edgeDefined = true;
  } catch (const Error&) {
    row.spectral.lambdaCirc = row.spectral.aCirc = kNaN;
  }
  if (row.spectral.thresholdSatisfied) {
    try {
      GaussianPrior prior(cfg.rho);
      auto fp = se_fixed_point(model, prior, ls, 1.0 / row.spectral.w2, 1.0 / row.spectral.w1 + 1.0 / model.sigma2);
      double a = fp.state.gamma1 * cfg.rho;
      row.seOverlap = fp.saturated ? 1.0 : std::sqrt(a / (a + 1.0));
    } catch (const Error&) {
    }
  }
  return row;
}

void emit_theory_csv(const std::vector<TheoryRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << "delta,deltaStar,thresholdSatisfied,gamma,w1,w2,w3,w4,eta,lambda1,lambdaCirc,seOverlap\n";
  for (const auto& r : rows) {
    const auto& s = r.spectral;
    os << fmt(r.delta) << ',' << fmt(r.deltaStar) << ',' << (s.thresholdSatisfied ? 1 : 0) << ',' << fmt(s.gamma)
       << ',' << fmt(s.w1) << ',' << fmt(s.w2) << ',' << fmt(s.w3) << ',' << fmt(s.w4) << ',' << fmt(s.eta) << ','
       << fmt(s.lambda1Limit) << ',' << fmt(s.lambdaCirc) << ',' << fmt(r.seOverlap) << '\n';
  }
}

SpectrumSummary spectrum_summary(const ExperimentConfig& cfg, int deltaIndex) {
  SpectrumSummary out;
  out.delta = cfg.deltaGrid.at(deltaIndex);
  Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(deltaIndex), 0}));
  TrialData td = sample_trial(cfg, out.delta, rng);
  out.kappa2 = td.cumulants.k2;
  SpectralTheory th = spectral_theory(td.cumulants, out.delta, td.model.gbar_moments(), cfg.rho);
  out.eta = th.etaDefined ? th.eta : kNaN;
  Preprocess pre = optimal_preprocess(td.model, td.cumulants, out.delta);
  Vec t = preprocess_responses(td.y, td.model, pre);
  SpectralResult s = build_D(td.design, t);
  out.lambda1 = s.lambda1;
  out.lambda2 = s.lambda2;
  out.overlap = overlap(s.v1, td.beta);
  try {
    out.lambdaCirc = BulkEdge(limiting_spectrum(td.law), empirical_law(t)).solve().lambdaCirc;
  } catch (const Error&) {
    out.lambdaCirc = kNaN;
  }
  return out;
}

void emit_spectrum_csv(const std::vector<SpectrumSummary>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << "delta,lambda1,lambda2,lambdaCirc,kappa2,eta,overlap\n";
  for (const auto& r : rows)
    os << fmt(r.delta) << ',' << fmt(r.lambda1) << ',' << fmt(r.lambda2) << ',' << fmt(r.lambdaCirc) << ','
       << fmt(r.kappa2) << ',' << fmt(r.eta) << ',' << fmt(r.overlap) << '\n';
}

void emit_trace_csv(const std::vector<BayesTraceRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << "t,gamma1,tau1,gamma2,tau2,v1,c1,v2,c2,overlap_empirical,overlap_se\n";
  for (const auto& r : rows) {
    const auto& s = r.se;
    os << s.t << ',' << fmt(s.gamma1) << ',' << fmt(s.tau1) << ',' << fmt(s.gamma2) << ',' << fmt(s.tau2) << ','
       << fmt(s.v1) << ',' << fmt(s.c1) << ',' << fmt(s.v2) << ',' << fmt(s.c2) << ',' << fmt(r.overlapEmpirical)
       << ',' << fmt(r.overlapSe) << '\n';
  }
}

ReplicaScanResult replica_scan(const ExperimentConfig& cfg, double delta, int gridPoints) {
  if (cfg.is_cdp()) throw Error(ErrorKind::Configuration, "replica scan needs a synthetic spectral law");
  SpectralLaw law = SpectralLaw::from_tag(cfg.law, delta);
  CumulantSet c = limiting_cumulants(law);
  GlmModel model = GlmModel::from_name(cfg.model, c.k2 * cfg.rho, cfg.quadDegree);
  GaussianPrior prior(cfg.rho);
  LimitingSpectrum ls = limiting_spectrum(law);
  ReplicaScanResult out;
  out.scan = scan_F_fixed_points(model, prior, ls, gridPoints);
  out.reachedBySe.assign(out.scan.fixedPoints.size(), false);
  SpectralTheory th = spectral_theory(c, delta, model.gbar_moments(), cfg.rho);
  if (!th.thresholdSatisfied || out.scan.fixedPoints.empty()) return out;
  try {
    auto fp = se_fixed_point(model, prior, ls, 1.0 / th.w2, 1.0 / th.w1 + 1.0 / model.sigma2);
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.scan.fixedPoints.size(); ++i)
      if (std::abs(out.scan.fixedPoints[i].v - fp.state.v1) < std::abs(out.scan.fixedPoints[best].v - fp.state.v1))
        best = i;
    if (std::abs(out.scan.fixedPoints[best].v - fp.state.v1) < 1e-5 * cfg.rho) out.reachedBySe[best] = true;
  } catch (const Error&) {
  }
  return out;
}

void emit_replica_csv(const ReplicaScanResult& r, const std::string& gridPath, const std::string& fixedPath) {
  {
    std::ofstream os(gridPath);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + gridPath);
    os << "v,F,tau1,gamma1,defined\n";
    for (const auto& f : r.scan.grid)
      os << fmt(f.v) << ',' << fmt(f.F) << ',' << fmt(f.tau1) << ',' << fmt(f.gamma1) << ',' << (f.defined ? 1 : 0)
         << '\n';
  }
  std::ofstream os(fixedPath);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + fixedPath);
  os << "v,F,tau1,gamma1,reached_by_se\n";
  for (std::size_t i = 0; i < r.scan.fixedPoints.size(); ++i) {
    const auto& f = r.scan.fixedPoints[i];
    os << fmt(f.v) << ',' << fmt(f.F) << ',' << fmt(f.tau1) << ',' << fmt(f.gamma1) << ','
       << (r.reachedBySe[i] ? 1 : 0) << '\n';
  }
}

}  // namespace glmamp
