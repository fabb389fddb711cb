#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace svqe {

struct LbfgsOptions {
  int history = 10;
  int max_iters = 5000;
  double grad_tol = 1e-8;  ///< stop when ||g||_2 falls below
  double c1 = 1e-4;        ///< sufficient decrease
  double c2 = 0.9;         ///< curvature (strong Wolfe)
  int max_line_search = 40;
};

enum class LbfgsStatus { kGradientTolerance, kMaxIterations, kLineSearchFailed };

std::string_view to_string(LbfgsStatus s);

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  std::vector<double> trajectory;  ///< f after each accepted step, starting at f(x0)

  bool converged() const { return status == LbfgsStatus::kGradientTolerance; }
};

/// Returns f(x) and writes the gradient into `grad` (already sized like x).
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing + cubic zoom).
LbfgsResult minimize_lbfgs(const Objective& fn, std::vector<double> x0,
                           const LbfgsOptions& opts = {});

}  // namespace svqe
