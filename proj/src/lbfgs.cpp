#include "svqe/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace svqe {

std::string_view to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::kGradientTolerance: return "gradient_tolerance";
    case LbfgsStatus::kMaxIterations: return "max_iterations";
    case LbfgsStatus::kLineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Sample {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative
  std::vector<double> x;
  std::vector<double> g;
};

class LineSearch {
 public:
  LineSearch(const Objective& fn, const std::vector<double>& x, const std::vector<double>& d,
             double f0, double slope0, const LbfgsOptions& opts, int& evaluations)
      : fn_(fn), x_(x), d_(d), f0_(f0), slope0_(slope0), opts_(opts), evals_(evaluations) {}

  /// Strong-Wolfe step; returns false if none was found within the budget.
  bool run(double initial_step, Sample& out) {
    Sample prev{0.0, f0_, slope0_, {}, {}};
    double step = initial_step;
    for (int i = 0; i < opts_.max_line_search; ++i) {
      Sample cur = evaluate(step);
      if (!std::isfinite(cur.f)) {
        step *= 0.5;
        continue;
      }
      if (cur.f > f0_ + opts_.c1 * step * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur, out);
      }
      if (std::abs(cur.slope) <= -opts_.c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      step *= 2.0;
    }
    return false;
  }

 private:
  Sample evaluate(double step) {
    Sample s;
    s.step = step;
    s.x.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) s.x[i] = x_[i] + step * d_[i];
    s.g.assign(x_.size(), 0.0);
    s.f = fn_(s.x, s.g);
    s.slope = dot(s.g, d_);
    ++evals_;
    return s;
  }

  static double cubic_min(const Sample& lo, const Sample& hi) {
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (lo.step - hi.step);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    const double width = hi.step - lo.step;
    double t = 0.5 * (lo.step + hi.step);
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), width);
      const double denom = hi.slope - lo.slope + 2.0 * d2;
      if (denom != 0.0) {
        const double c = hi.step - width * (hi.slope + d2 - d1) / denom;
        if (std::isfinite(c)) t = c;
      }
    }
    const double a = std::min(lo.step, hi.step);
    const double b = std::max(lo.step, hi.step);
    const double margin = 0.1 * (b - a);
    return std::clamp(t, a + margin, b - margin);
  }

  bool zoom(Sample lo, Sample hi, Sample& out) {
    for (int i = 0; i < opts_.max_line_search; ++i) {
      if (std::abs(hi.step - lo.step) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
      Sample cur = evaluate(cubic_min(lo, hi));
      if (!std::isfinite(cur.f) || cur.f > f0_ + opts_.c1 * cur.step * slope0_ || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opts_.c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    return false;
  }

  const Objective& fn_;
  const std::vector<double>& x_;
  const std::vector<double>& d_;
  double f0_;
  double slope0_;
  const LbfgsOptions& opts_;
  int& evals_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& fn, std::vector<double> x0, const LbfgsOptions& opts) {
  if (opts.history < 1 || opts.max_iters < 0) {
    throw std::invalid_argument("minimize_lbfgs: invalid options");
  }
  LbfgsResult r;
  r.x = std::move(x0);
  std::vector<double> g(r.x.size(), 0.0);
  r.f = fn(r.x, g);
  r.evaluations = 1;
  r.trajectory.push_back(r.f);
  r.grad_norm = norm(g);

  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  const std::size_t n = r.x.size();
  std::vector<double> d(n);
  std::vector<double> alpha(static_cast<std::size_t>(opts.history));

  while (true) {
    if (r.grad_norm < opts.grad_tol) {
      r.status = LbfgsStatus::kGradientTolerance;
      return r;
    }
    if (r.iterations >= opts.max_iters) {
      r.status = LbfgsStatus::kMaxIterations;
      return r;
    }

    // Two-loop recursion: d = -H g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    const std::size_t m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * y_hist[k][i];
    }
    if (m > 0) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * s_hist[k][i];
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }

    const double step0 = s_hist.empty() ? std::min(1.0, 1.0 / r.grad_norm) : 1.0;
    LineSearch ls(fn, r.x, d, r.f, slope, opts, r.evaluations);
    Sample next;
    if (!ls.run(step0, next)) {
      r.status = LbfgsStatus::kLineSearchFailed;
      return r;
    }

    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = next.x[i] - r.x[i];
      y[i] = next.g[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 0.0) {
      if (static_cast<int>(s_hist.size()) == opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    r.x = std::move(next.x);
    g = std::move(next.g);
    r.f = next.f;
    r.grad_norm = norm(g);
    r.trajectory.push_back(r.f);
    ++r.iterations;
  }
}

}  // namespace svqe
