#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace spinctl {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_iterations = 2000;
  // Converged when f(worst) - f(best) falls below this.
  double tolerance = 1e-10;
  // After convergence with budget left, rebuild the simplex around the best
  // point with this step along each axis. 0 disables restarts.
  double restart_step = 0.0;
  // Stop once a restart fails to improve the best value by more than `tolerance`.
  int max_stale_restarts = 1;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  // Best value after each iteration that improved it; non-increasing.
  std::vector<double> history;
  int iterations = 0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

// Minimize with the classic Nelder-Mead simplex method. `simplex` holds n + 1
// vertices of dimension n.
NelderMeadResult nelder_mead(const ObjectiveFn& f, std::vector<Eigen::VectorXd> simplex,
                             const NelderMeadOptions& opts = {});

// Axis-aligned starting simplex: x0 and x0 + step e_i.
std::vector<Eigen::VectorXd> axis_simplex(const Eigen::VectorXd& x0, double step);

}  // namespace spinctl
