#include "glmamp/gvamp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace glmamp;

namespace {

struct Problem {
  Design design;
  Vec beta, z, y, gbar;
  GlmModel model;
  GaussianPrior prior;
  LimitingSpectrum law;
  CumulantSet c;
  SpectralTheory th;
  SpectralResult spec;
};

Problem problem(const std::string& tag, double delta, int d, std::uint64_t seed,
                const std::string& model = "phase-retrieval") {
  Rng rng = make_rng(seed);
  SpectralLaw law = SpectralLaw::from_tag(tag, delta);
  Problem p{build_design(static_cast<int>(std::lround(delta * d)), d, law, rng),
            Vec(d), Vec(), Vec(), Vec(), GlmModel(), GaussianPrior(1.0), limiting_spectrum(law),
            limiting_cumulants(law), {}, {}};
  p.model = GlmModel::from_name(model, p.c.k2);
  std::normal_distribution<double> nd;
  for (auto& v : p.beta) v = nd(rng);
  p.z = p.design.X * p.beta;
  p.y = p.model.sample(p.z, rng);
  p.gbar = p.y.unaryExpr([&](double v) { return p.model.gbar(v); });
  p.th = spectral_theory(p.c, delta, p.model.gbar_moments(), 1.0);
  p.spec = build_D(p.design, p.y, p.model, optimal_preprocess(p.model, p.c, delta));
  return p;
}

double rel_diff(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("spectral init: constants and scaling") {
  Problem p = problem("mp", 1.0, 200, 501);
  SpectralInit init = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, 1);
  CHECK(std::abs(init.cr - std::sqrt(6.0) / 5) < 1e-14);
  CHECK(std::abs(init.cp - std::sqrt(6.0) / 5) < 1e-14);
  CHECK(std::abs(init.r0.squaredNorm() / p.design.d - init.cr * init.cr) < 1e-12);

  Vec expectP = init.cp * p.th.gamma *
                (p.design.X * (std::sqrt(200.0) * p.spec.v1)).cwiseQuotient((p.gbar.array() + p.th.gamma).matrix());
  CHECK(rel_diff(init.p0, expectP) < 1e-13);

  SpectralInit neg = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, -1);
  CHECK(rel_diff(neg.r0, -init.r0) < 1e-15);
  CHECK(rel_diff(neg.p0, -init.p0) < 1e-15);
  CHECK(oracle_sign(p.spec.v1, p.beta) * oracle_sign(-p.spec.v1, p.beta) == -1);
}

TEST_CASE("spectral init: singular shift is reported") {
  Problem p = problem("mp", 1.0, 100, 502);
  Vec g = p.gbar;
  g[7] = -p.th.gamma;
  try {
    spectral_init(p.design, g, p.spec.v1, p.th, 1.0, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InitSolver);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}

TEST_CASE("bayes gvamp: initial scalars, identities and the standalone recursion") {
  Problem p = problem("mp", 1.0, 300, 503);
  SpectralInit init = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, oracle_sign(p.spec.v1, p.beta));
  BayesGvampRun run = run_bayes_gvamp(p.design, p.y, p.model, p.prior, p.law, p.th, init, 12, 0.0, &p.beta);
  REQUIRE(run.trace.size() == 12);
  CHECK(run.iterations == 12);
  CHECK(std::abs(run.trace[0].se.gamma1 - 0.2) < 1e-14);
  CHECK(std::abs(run.trace[0].se.tau1 - 1.2) < 1e-14);

  auto se = se_recursion(p.model, p.prior, p.law, run.trace[0].se.gamma1, run.trace[0].se.tau1, 12);
  for (std::size_t t = 0; t < run.trace.size(); ++t) {
    const BayesSeState& s = run.trace[t].se;
    CHECK(s.gamma1 == se[t].gamma1);
    CHECK(s.tau1 == se[t].tau1);
    CHECK(s.v2 == se[t].v2);
    CHECK(std::abs(s.gamma2 - (1 / s.v1 - s.gamma1)) < 1e-12 * std::max(1.0, s.gamma2));
    CHECK(std::abs(s.tau2 - (1 / s.c1 - s.tau1)) < 1e-12 * std::max(1.0, s.tau2));
    if (t + 1 < run.trace.size()) {
      const BayesSeState& n = run.trace[t + 1].se;
      CHECK(std::abs(n.gamma1 - (1 / s.v2 - s.gamma2)) < 1e-12 * std::max(1.0, n.gamma1));
      CHECK(std::abs(n.tau1 - (1 / s.c2 - s.tau2)) < 1e-12 * std::max(1.0, n.tau1));
    }
    CHECK(std::abs(run.trace[t].overlapSe - std::sqrt(s.gamma1 / (s.gamma1 + 1))) < 1e-12);
  }
}

TEST_CASE("bayes gvamp: stopping rule") {
  Problem p = problem("beta12", 2.0, 200, 504);
  SpectralInit init = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, oracle_sign(p.spec.v1, p.beta));
  BayesGvampRun a = run_bayes_gvamp(p.design, p.y, p.model, p.prior, p.law, p.th, init, 5, 0.0, &p.beta);
  CHECK(a.iterations == 5);
  BayesGvampRun b = run_bayes_gvamp(p.design, p.y, p.model, p.prior, p.law, p.th, init, 200, 1e-6, &p.beta);
  CHECK(b.iterations < 200);
}

TEST_CASE("bayes gvamp: canonical block equals the generic form") {
  for (const char* model : {"phase-retrieval", "poisson"}) {
    Problem p = problem("beta12", 2.0, 100, 505, model);
    SpectralInit init = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, 1);
    double g1 = 1 / p.th.w2, t1 = 1 / p.th.w1 + 1 / p.model.sigma2;
    BayesGvampState s0 = bayes_gvamp_step(p.design, p.y, p.model, p.prior, p.law, init.r0, init.p0, g1, t1, 0);
    for (int t = 1; t <= 4; ++t) {
      BayesGvampState s1 = bayes_gvamp_step(p.design, p.y, p.model, p.prior, p.law, s0.rNext, s0.pNext,
                                            next_gamma1(s0.se), next_tau1(s0.se), t);
      GvampDenoisers den = bayes_denoisers(p.y, p.model, p.prior, s0.se, &s1.se);
      GenericIterate g = generic_gvamp_step(p.design, s0.rTilde, s0.pTilde, den);
      CAPTURE(model);
      CAPTURE(t);
      CHECK(rel_diff(g.r, s0.rNext) < 1e-10);
      CHECK(rel_diff(g.p, s0.pNext) < 1e-10);
      CHECK(rel_diff(g.rTilde, s1.rTilde) < 1e-10);
      CHECK(rel_diff(g.pTilde, s1.pTilde) < 1e-10);
      s0 = s1;
    }
  }
}

TEST_CASE("bayes gvamp: matrix denoisers are trace-free and vector denoisers divergence-free") {
  for (const char* model : {"phase-retrieval", "poisson"}) {
    Problem p = problem("beta12", 2.0, 200, 506, model);
    SpectralInit init = spectral_init(p.design, p.gbar, p.spec.v1, p.th, 1.0, oracle_sign(p.spec.v1, p.beta));
    BayesGvampRun run = run_bayes_gvamp(p.design, p.y, p.model, p.prior, p.law, p.th, init, 6, 0.0, &p.beta);
    for (const BayesTraceRow& row : run.trace) {
      if (se_saturated(row.se.gamma1, 1.0)) break;
      DenoiserChecks c = denoiser_checks(p.model, p.prior, p.law, row.se);
      CAPTURE(model);
      CAPTURE(row.se.t);
      CHECK(std::abs(c.phiTrace) < 1e-8);
      CHECK(std::abs(c.psiTrace) < 1e-8);
      CHECK(std::abs(c.fDivergence) < 1e-6);
      CHECK(std::abs(c.gDivergence) < 1e-6);
    }
  }
}

TEST_CASE("generic gvamp: zero denoisers and the linearized specialization") {
  Problem p = problem("mp", 1.0, 300, 507);
  GvampDenoisers zero{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                      [](double) { return 0.0; }, [](const Vec& v) { return Vec(Vec::Zero(v.size())); },
                      [](const Vec& v) { return Vec(Vec::Zero(v.size())); }};
  GenericIterate g0 = generic_gvamp_step(p.design, Vec::Ones(300), Vec::Ones(300), zero);
  CHECK(g0.r.isZero());
  CHECK(g0.p.isZero());

  const double k2 = p.c.k2;
  Vec gb = p.gbar;
  GvampDenoisers lin{[](double) { return 0.0; }, [k2](double s) { return s / k2; },
                     [k2](double x) { return x / k2 - 1.0; }, [](double) { return 0.0; },
                     [](const Vec& v) { return v; }, [gb](const Vec& v) { return Vec(gb.cwiseProduct(v)); }};
  const double nu0 = 0.7;
  Rng rng = make_rng(1);
  LinearizedTrace tr = linearized_gvamp(p.design, p.gbar, p.z, k2, nu0, 0.0, 10, rng, &p.spec.v1);
  Vec pTilde = gb.cwiseProduct(nu0 * p.z);
  Vec rTilde = Vec::Zero(300);
  double prev = 0;
  Vec r;
  for (int t = 1; t <= 10; ++t) {
    GenericIterate g = generic_gvamp_step(p.design, rTilde, pTilde, lin);
    double norm = g.p.norm();
    if (t >= 2) CHECK(std::abs(norm / prev - tr.ratio[t - 2]) < 1e-10 * tr.ratio[t - 2]);
    prev = norm;
    r = g.r;
    rTilde = g.rTilde;
    pTilde = g.pTilde;
  }
  CHECK(std::abs(std::abs(r.dot(tr.v)) / (r.norm() * tr.v.norm()) - 1) < 1e-12);
}

TEST_CASE("linearized gvamp: zero preprocessing gives zero iterates") {
  Problem p = problem("mp", 1.0, 100, 508);
  Rng rng = make_rng(2);
  LinearizedTrace tr = linearized_gvamp(p.design, Vec::Zero(100), p.z, 1.0, 1.0, 1.0, 5, rng);
  CHECK(tr.v.isZero());
  for (double r : tr.ratio) CHECK(r == 0.0);
}

TEST_CASE("linearized gvamp: the ratio limit puts kappa2 at the top of D") {
  // mu is an eigenvalue of (XX^T / kappa2 - I) Gbar iff kappa2 is one of X^T diag(gbar / (gbar + mu)) X,
  // and v = X^T g / kappa2 is the matching eigenvector.
  for (const char* tag : {"mp", "beta12"}) {
    Problem p = problem(tag, 2.0, 600, 509);
    Rng rng = make_rng(3);
    LinearizedTrace tr = linearized_gvamp(p.design, p.gbar, p.z, p.c.k2, 1.0, 0.5, 80, rng);
    const double mu = tr.ratio.back();
    CHECK(std::abs(tr.cosine.back() - 1) < 1e-10);
    Vec t = p.gbar.unaryExpr([mu](double g) { return g / (g + mu); });
    SpectralResult d = build_D(p.design, t);
    CAPTURE(tag);
    CHECK(std::abs(d.lambda1 - p.c.k2) < 1e-8);
    CHECK(std::abs(std::abs(d.v1.dot(tr.v)) / tr.v.norm() - 1) < 1e-8);
  }
}
