#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <string>

namespace mcae::optim {

using Vector = Eigen::VectorXd;

/// f(x) with gradient written to grad. May return a non-finite value; the
/// line search treats that as "step too long".
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsOptions {
  int max_iters = 400;
  double tol = 1e-6;  // stop when ||grad||_2 < tol
  int history = 10;
  double c1 = 1e-4;   // sufficient decrease
  double c2 = 0.9;    // curvature
  int max_line_evals = 40;
};

struct IterationInfo {
  int iteration = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  const Vector* x = nullptr;
};

enum class StopReason { GradientTolerance, MaxIterations, LineSearchFailed };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::GradientTolerance: return "gradient-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

struct MinimizeResult {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  StopReason reason = StopReason::MaxIterations;
};

namespace detail {

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative g(x + alpha d) . d
  Vector x;
  Vector g;
  bool finite() const { return std::isfinite(f) && std::isfinite(slope); }
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or the
// bisection point when it is undefined or falls outside the bracket's interior.
inline double cubic_step(const LinePoint& a, const LinePoint& b) {
  const double lo = std::min(a.alpha, b.alpha), hi = std::max(a.alpha, b.alpha);
  const double mid = 0.5 * (lo + hi);
  if (!a.finite() || !b.finite()) return mid;
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  const double denom = b.slope - a.slope + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return mid;
  return t;
}

}  // namespace detail

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing plus
/// cubic-interpolation zoom). Every accepted step satisfies the Armijo
/// condition, so f is strictly decreasing across iterations.
class Lbfgs {
 public:
  explicit Lbfgs(LbfgsOptions opts = {}) : opts_(opts) {}

  MinimizeResult minimize(const Objective& fn, Vector x0,
                          const std::function<void(const IterationInfo&)>& on_iter = {}) const {
    MinimizeResult res;
    Vector g(x0.size());
    double f = fn(x0, g);
    ++res.evaluations;
    res.x = std::move(x0);
    res.f = f;
    res.grad_norm = g.norm();
    if (!std::isfinite(f) || !g.allFinite()) {
      res.reason = StopReason::LineSearchFailed;
      return res;
    }
    if (on_iter) on_iter({0, f, res.grad_norm, 0.0, &res.x});

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    for (int it = 1; it <= opts_.max_iters; ++it) {
      if (res.grad_norm < opts_.tol) {
        res.reason = StopReason::GradientTolerance;
        return res;
      }
      Vector d = -two_loop(g, s_hist, y_hist, rho_hist);
      double slope = g.dot(d);
      if (!(slope < 0.0)) {
        // Not a descent direction; fall back to steepest descent.
        s_hist.clear(), y_hist.clear(), rho_hist.clear();
        d = -g;
        slope = g.dot(d);
      }
      const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / res.grad_norm) : 1.0;
      detail::LinePoint pt;
      bool ok = line_search(fn, res.x, f, g, d, slope, alpha0, pt, res.evaluations);
      if (!ok && !s_hist.empty()) {
        s_hist.clear(), y_hist.clear(), rho_hist.clear();
        d = -g;
        slope = g.dot(d);
        ok = line_search(fn, res.x, f, g, d, slope, std::min(1.0, 1.0 / res.grad_norm), pt,
                         res.evaluations);
      }
      if (!ok) {
        res.reason = StopReason::LineSearchFailed;
        return res;
      }
      Vector s = pt.x - res.x;
      Vector y = pt.g - g;
      const double sy = s.dot(y);
      if (sy > 1e-12 * y.squaredNorm()) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > opts_.history) {
          s_hist.pop_front(), y_hist.pop_front(), rho_hist.pop_front();
        }
      }
      res.x = std::move(pt.x);
      g = std::move(pt.g);
      f = pt.f;
      res.f = f;
      res.grad_norm = g.norm();
      res.iterations = it;
      if (on_iter) on_iter({it, f, res.grad_norm, pt.alpha, &res.x});
    }
    res.reason =
        res.grad_norm < opts_.tol ? StopReason::GradientTolerance : StopReason::MaxIterations;
    return res;
  }

 private:
  static Vector two_loop(const Vector& g, const std::deque<Vector>& s, const std::deque<Vector>& y,
                         const std::deque<double>& rho) {
    Vector q = g;
    const auto m = s.size();
    std::vector<double> a(m);
    for (std::size_t i = m; i-- > 0;) {
      a[i] = rho[i] * s[i].dot(q);
      q -= a[i] * y[i];
    }
    if (m > 0) q *= s.back().dot(y.back()) / y.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double b = rho[i] * y[i].dot(q);
      q += (a[i] - b) * s[i];
    }
    return q;
  }

  detail::LinePoint probe(const Objective& fn, const Vector& x, const Vector& d, double alpha,
                          int& evals) const {
    detail::LinePoint p;
    p.alpha = alpha;
    p.x = x + alpha * d;
    p.g.resize(x.size());
    p.f = fn(p.x, p.g);
    ++evals;
    p.slope = p.g.allFinite() ? p.g.dot(d) : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(p.f)) p.f = std::numeric_limits<double>::infinity();
    return p;
  }

  // Strong-Wolfe search; returns false if no point with sufficient decrease
  // was found within the evaluation budget.
  bool line_search(const Objective& fn, const Vector& x, double f0, const Vector& g0,
                   const Vector& d, double slope0, double alpha, detail::LinePoint& out,
                   int& evals) const {
    detail::LinePoint zero;
    zero.alpha = 0.0;
    zero.f = f0;
    zero.slope = slope0;
    zero.x = x;
    zero.g = g0;

    auto armijo = [&](const detail::LinePoint& p) {
      return p.finite() && p.f <= f0 + opts_.c1 * p.alpha * slope0 && p.f < f0;
    };
    auto curvature = [&](const detail::LinePoint& p) {
      return std::abs(p.slope) <= -opts_.c2 * slope0;
    };

    detail::LinePoint prev = zero;
    detail::LinePoint best;  // best Armijo point seen, used if the budget runs out
    bool have_best = false;
    auto note = [&](const detail::LinePoint& p) {
      if (armijo(p) && (!have_best || p.f < best.f)) best = p, have_best = true;
    };

    int budget = opts_.max_line_evals;
    for (int i = 0; budget > 0; ++i) {
      detail::LinePoint cur = probe(fn, x, d, alpha, evals);
      --budget;
      note(cur);
      if (!armijo(cur) || (i > 0 && cur.f >= prev.f)) {
        return zoom(fn, x, d, f0, slope0, prev, cur, budget, out, evals, best, have_best);
      }
      if (curvature(cur)) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) {
        return zoom(fn, x, d, f0, slope0, cur, prev, budget, out, evals, best, have_best);
      }
      prev = std::move(cur);
      alpha *= 2.0;
    }
    if (have_best) {
      out = std::move(best);
      return true;
    }
    return false;
  }

  bool zoom(const Objective& fn, const Vector& x, const Vector& d, double f0, double slope0,
            detail::LinePoint lo, detail::LinePoint hi, int budget, detail::LinePoint& out,
            int& evals, detail::LinePoint& best, bool& have_best) const {
    auto armijo = [&](const detail::LinePoint& p) {
      return p.finite() && p.f <= f0 + opts_.c1 * p.alpha * slope0 && p.f < f0;
    };
    while (budget-- > 0) {
      const double alpha = detail::cubic_step(lo, hi);
      if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      detail::LinePoint cur = probe(fn, x, d, alpha, evals);
      if (armijo(cur) && (!have_best || cur.f < best.f)) best = cur, have_best = true;
      if (!armijo(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opts_.c2 * slope0) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    if (have_best) {
      out = std::move(best);
      return true;
    }
    return false;
  }

  LbfgsOptions opts_;
};

}  // namespace mcae::optim
