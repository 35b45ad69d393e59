#pragma once

#include "glmamp/designs.hpp"
#include "glmamp/models.hpp"

#include <string>
#include <vector>

namespace glmamp {

enum class PostulatedModel { AbsValue, Square };
enum class GdLoss { Squared, Absolute };

struct GdConfig {
  double learningRate = 0.1;
  int steps = 500;
  PostulatedModel postulated = PostulatedModel::AbsValue;
  GdLoss loss = GdLoss::Squared;
  // Stop once |L_t - L_{t-1}| <= relTol * |L_{t-1}|; 0 disables the check.
  double relTol = 1e-10;
  Vec init;
};

// Defaults per model and law tag: |z| with half squared loss, or z^2 with absolute loss.
GdConfig default_gd_config(const GlmModel& model, const std::string& lawTag);

struct GdResult {
  Vec theta;
  std::vector<double> loss;     // loss[0] at init
  std::vector<double> overlap;  // filled when beta* is given
  int steps = 0;
};

double gd_loss(const Design& design, const Vec& y, const Vec& theta, const GdConfig& cfg);
Vec gd_gradient(const Design& design, const Vec& y, const Vec& theta, const GdConfig& cfg);

GdResult run_gd(const Design& design, const Vec& y, const GdConfig& cfg, const Vec* beta = nullptr);

PostulatedModel postulated_from_name(const std::string& name);
GdLoss loss_from_name(const std::string& name);

}  // namespace glmamp
