#pragma once

namespace binfam {

// Knobs shared by the sparse-structure fits. epsilon_marginal and delta_corr
// drive the structure selection (extreme-mean components drop out, weakly
// correlated pairs are not modeled); the remaining fields control the
// penalized Newton iterations.
struct FitConfig {
  double epsilon_marginal = 0.01;
  double delta_corr = 0.10;
  double penalty = 1e-4;
  double newton_tol = 1e-3;
  int max_iter = 50;
  double blowup_threshold = 25.0;

  void validate() const;
};

}  // namespace binfam
