#include <gtest/gtest.h>

#include <cmath>

#include "spinctl/errors.hpp"
#include "spinctl/nelder_mead.hpp"

using namespace spinctl;

namespace {

double quadratic(const Eigen::VectorXd& x) {
  const Eigen::Vector4d c(1.0, 2.5, 0.7, 4.0);
  const Eigen::Vector4d a(0.3, -1.2, 2.0, 0.5);
  return (c.array() * (x - a).array().square()).sum();
}

}  // namespace

TEST(NelderMead, QuadraticInFourDimensions) {
  NelderMeadOptions opts;
  opts.tolerance = 1e-16;
  const auto r = nelder_mead(quadratic, axis_simplex(Eigen::VectorXd::Zero(4), 1.0), opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2000);
  EXPECT_LT((r.x - Eigen::Vector4d(0.3, -1.2, 2.0, 0.5)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(NelderMead, HistoryIsNonIncreasing) {
  const auto r = nelder_mead(quadratic, axis_simplex(Eigen::VectorXd::Constant(4, 3.0), 0.5));
  ASSERT_FALSE(r.history.empty());
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
  EXPECT_DOUBLE_EQ(r.history.back(), r.value);
}

TEST(NelderMead, RosenbrockWithRestarts) {
  auto rosen = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  NelderMeadOptions opts;
  opts.max_iterations = 5000;
  opts.tolerance = 1e-14;
  opts.restart_step = 0.1;
  const auto r = nelder_mead(rosen, axis_simplex(Eigen::Vector2d(-1.2, 1.0), 0.5), opts);
  EXPECT_NEAR(r.x(0), 1.0, 1e-4);
  EXPECT_NEAR(r.x(1), 1.0, 1e-4);
}

TEST(NelderMead, IterationBudget) {
  NelderMeadOptions opts;
  opts.max_iterations = 5;
  opts.tolerance = 0.0;
  const auto r = nelder_mead(quadratic, axis_simplex(Eigen::VectorXd::Zero(4), 1.0), opts);
  EXPECT_EQ(r.iterations, 5);
  EXPECT_FALSE(r.converged);
}

TEST(NelderMead, RejectsBadSimplex) {
  EXPECT_THROW(nelder_mead(quadratic, {Eigen::VectorXd::Zero(4)}), ValidationError);
  EXPECT_THROW(nelder_mead(quadratic, {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)}),
               ValidationError);
  EXPECT_THROW(nelder_mead(quadratic, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(2)}),
               ValidationError);
}
