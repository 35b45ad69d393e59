#include "glmamp/baselines.hpp"

#include "glmamp/spectral.hpp"

#include <cmath>
#include <string>

namespace glmamp {

namespace {

double sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

GdConfig default_gd_config(const GlmModel& model, const std::string& lawTag) {
  GdConfig cfg;
  if (model.kind == ModelKind::PhaseRetrieval) {
    cfg.postulated = PostulatedModel::AbsValue;
    cfg.loss = GdLoss::Squared;
    cfg.learningRate = lawTag == "beta12" ? 0.01 : 0.1;
  } else {
    cfg.postulated = PostulatedModel::Square;
    cfg.loss = GdLoss::Absolute;
    cfg.learningRate = 0.001;
  }
  return cfg;
}

double gd_loss(const Design& design, const Vec& y, const Vec& theta, const GdConfig& cfg) {
  Vec z = design.X * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double yhat = cfg.postulated == PostulatedModel::AbsValue ? std::abs(z[i]) : z[i] * z[i];
    double res = yhat - y[i];
    total += cfg.loss == GdLoss::Squared ? 0.5 * res * res : std::abs(res);
  }
  return total;
}

Vec gd_gradient(const Design& design, const Vec& y, const Vec& theta, const GdConfig& cfg) {
  Vec z = design.X * theta;
  Vec w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double yhat, dq;
    if (cfg.postulated == PostulatedModel::AbsValue) {
      yhat = std::abs(z[i]);
      dq = sgn(z[i]);
    } else {
      yhat = z[i] * z[i];
      dq = 2.0 * z[i];
    }
    double res = yhat - y[i];
    double dl = cfg.loss == GdLoss::Squared ? res : sgn(res);
    w[i] = dl * dq;
  }
  return design.X.transpose() * w;
}

GdResult run_gd(const Design& design, const Vec& y, const GdConfig& cfg, const Vec* beta) {
  if (!(cfg.learningRate > 0)) throw Error(ErrorKind::Configuration, "gd learning rate must be > 0");
  if (cfg.steps < 0) throw Error(ErrorKind::Configuration, "gd steps must be >= 0");
  if (cfg.init.size() != design.d) throw Error(ErrorKind::InvalidDimension, "gd init has the wrong length");
  GdResult res;
  res.theta = cfg.init;
  double prev = gd_loss(design, y, res.theta, cfg);
  res.loss.push_back(prev);
  if (beta) res.overlap.push_back(overlap(res.theta, *beta));
  for (int t = 1; t <= cfg.steps; ++t) {
    res.theta -= cfg.learningRate * gd_gradient(design, y, res.theta, cfg);
    double cur = gd_loss(design, y, res.theta, cfg);
    if (!std::isfinite(cur))
      throw Error(ErrorKind::Divergence, "gradient descent loss is not finite at step " + std::to_string(t));
    res.loss.push_back(cur);
    if (beta) res.overlap.push_back(overlap(res.theta, *beta));
    res.steps = t;
    if (cfg.relTol > 0 && std::abs(cur - prev) <= cfg.relTol * std::abs(prev)) break;
    prev = cur;
  }
  return res;
}

PostulatedModel postulated_from_name(const std::string& name) {
  if (name == "abs") return PostulatedModel::AbsValue;
  if (name == "square") return PostulatedModel::Square;
  throw Error(ErrorKind::Configuration, "unknown gd.model '" + name + "' (abs|square)");
}

GdLoss loss_from_name(const std::string& name) {
  if (name == "squared") return GdLoss::Squared;
  if (name == "absolute") return GdLoss::Absolute;
  throw Error(ErrorKind::Configuration, "unknown gd.loss '" + name + "' (squared|absolute)");
}

}  // namespace glmamp
