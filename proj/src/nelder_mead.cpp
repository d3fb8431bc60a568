#include "spinctl/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spinctl/errors.hpp"

namespace spinctl {

std::vector<Eigen::VectorXd> axis_simplex(const Eigen::VectorXd& x0, double step) {
  std::vector<Eigen::VectorXd> out{x0};
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    Eigen::VectorXd v = x0;
    v(i) += step;
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// NaN compares as worse than anything.
double sanitize(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

class Simplex {
 public:
  Simplex(const ObjectiveFn& f, std::vector<Eigen::VectorXd> pts, NelderMeadResult& r)
      : f_(&f), r_(&r), pts_(std::move(pts)), vals_(pts_.size()) {
    for (std::size_t i = 0; i < pts_.size(); ++i) vals_[i] = eval(pts_[i]);
    order();
  }

  double best() const { return vals_.front(); }
  double spread() const { return vals_.back() - vals_.front(); }
  const Eigen::VectorXd& best_point() const { return pts_.front(); }

  void step(const NelderMeadOptions& o) {
    const std::size_t n = pts_.size() - 1;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(pts_[0].size());
    for (std::size_t i = 0; i < n; ++i) c += pts_[i];
    c /= static_cast<double>(n);

    const Eigen::VectorXd& worst = pts_[n];
    const Eigen::VectorXd xr = c + o.reflection * (c - worst);
    const double fr = eval(xr);

    if (fr < vals_[0]) {
      const Eigen::VectorXd xe = c + o.expansion * (xr - c);
      const double fe = eval(xe);
      if (fe < fr) replace_worst(xe, fe); else replace_worst(xr, fr);
    } else if (fr < vals_[n - 1]) {
      replace_worst(xr, fr);
    } else if (fr < vals_[n]) {
      const Eigen::VectorXd xc = c + o.contraction * (xr - c);
      const double fc = eval(xc);
      if (fc <= fr) replace_worst(xc, fc); else shrink(o.shrink);
    } else {
      const Eigen::VectorXd xc = c + o.contraction * (worst - c);
      const double fc = eval(xc);
      if (fc < vals_[n]) replace_worst(xc, fc); else shrink(o.shrink);
    }
    order();
  }

 private:
  double eval(const Eigen::VectorXd& x) {
    ++r_->evaluations;
    return sanitize((*f_)(x));
  }

  void replace_worst(const Eigen::VectorXd& x, double v) {
    pts_.back() = x;
    vals_.back() = v;
  }

  void shrink(double sigma) {
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      pts_[i] = pts_[0] + sigma * (pts_[i] - pts_[0]);
      vals_[i] = eval(pts_[i]);
    }
  }

  void order() {
    std::vector<std::size_t> idx(pts_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals_[a] < vals_[b]; });
    std::vector<Eigen::VectorXd> p;
    std::vector<double> v;
    for (auto i : idx) {
      p.push_back(std::move(pts_[i]));
      v.push_back(vals_[i]);
    }
    pts_ = std::move(p);
    vals_ = std::move(v);
  }

  const ObjectiveFn* f_;
  NelderMeadResult* r_;
  std::vector<Eigen::VectorXd> pts_;
  std::vector<double> vals_;
};

}  // namespace

NelderMeadResult nelder_mead(const ObjectiveFn& f, std::vector<Eigen::VectorXd> simplex,
                             const NelderMeadOptions& opts) {
  if (simplex.size() < 2) throw ValidationError("nelder_mead: simplex needs at least two vertices");
  const Eigen::Index dim = simplex.front().size();
  if (static_cast<Eigen::Index>(simplex.size()) != dim + 1) {
    throw ValidationError("nelder_mead: simplex must have dimension + 1 vertices");
  }
  for (const auto& v : simplex) {
    if (v.size() != dim) throw ValidationError("nelder_mead: vertex dimensions differ");
  }

  NelderMeadResult r;
  Simplex s(f, std::move(simplex), r);
  r.x = s.best_point();
  r.value = s.best();
  r.history.push_back(r.value);

  int stale = 0;
  double value_at_restart = r.value;
  while (r.iterations < opts.max_iterations) {
    if (s.spread() < opts.tolerance) {
      r.converged = true;
      if (opts.restart_step <= 0.0) break;
      if (r.restarts > 0 && value_at_restart - r.value <= opts.tolerance) {
        if (++stale >= opts.max_stale_restarts) break;
      } else {
        stale = 0;
      }
      value_at_restart = r.value;
      ++r.restarts;
      s = Simplex(f, axis_simplex(r.x, opts.restart_step), r);
      r.converged = false;
      continue;
    }
    s.step(opts);
    ++r.iterations;
    if (s.best() < r.value) {
      r.value = s.best();
      r.x = s.best_point();
      r.history.push_back(r.value);
    }
  }
  if (s.spread() < opts.tolerance) r.converged = true;
  return r;
}

}  // namespace spinctl
