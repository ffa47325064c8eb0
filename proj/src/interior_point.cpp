#include "ogf/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ogf {

namespace {

using Lse = LogSumExp<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint origin in the reduced problem.
struct Origin {
  enum class Kind { kProgram, kLower, kUpper } kind;
  Index index;  // program constraint or full variable index
};

struct Reduced {
  std::vector<Index> free;        // full index of each reduced variable
  std::vector<Index> to_reduced;  // -1 for fixed variables
  VectorXd fixed_x;               // full-length, fixed entries set
  Lse objective;
  std::vector<Lse> constraints;
  std::vector<Origin> origin;
  // Program constraints that only involve fixed variables: (index, value).
  std::vector<std::pair<Index, double>> constants;
};

// Substitutes fixed variables into g. Returns nullopt-equivalent through
// `is_constant` when nothing free remains.
Lse reduce(const Lse& g, const Reduced& r, bool& is_constant, double& constant_value) {
  is_constant = false;
  if (g.empty()) {
    is_constant = true;
    constant_value = 0.0;
    return g;
  }
  std::vector<Index> support;
  std::vector<Index> keep_cols;
  VectorXd b = g.log_coeffs();
  for (std::size_t j = 0; j < g.support().size(); ++j) {
    const Index full = g.support()[j];
    const Index red = r.to_reduced[static_cast<std::size_t>(full)];
    if (red >= 0) {
      support.push_back(red);
      keep_cols.push_back(static_cast<Index>(j));
    } else {
      b += g.exponents().col(static_cast<Index>(j)) * r.fixed_x[full];
    }
  }
  if (support.empty()) {
    is_constant = true;
    const double ymax = b.maxCoeff();
    constant_value = ymax + std::log((b.array() - ymax).exp().sum());
    return g;
  }
  MatrixXd a(g.terms(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < keep_cols.size(); ++j) a.col(static_cast<Index>(j)) = g.exponents().col(keep_cols[j]);
  return Lse(std::move(support), std::move(a), std::move(b));
}

Reduced reduce_program(const ConvexProgram& p) {
  Reduced r;
  const Index n = p.size();
  r.to_reduced.assign(static_cast<std::size_t>(n), -1);
  r.fixed_x = VectorXd::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if (p.lower[k] == p.upper[k]) {
      r.fixed_x[k] = p.lower[k];
    } else {
      r.to_reduced[static_cast<std::size_t>(k)] = static_cast<Index>(r.free.size());
      r.free.push_back(k);
    }
  }
  bool is_constant = false;
  double value = 0.0;
  r.objective = reduce(p.objective, r, is_constant, value);
  if (is_constant) r.objective = Lse();

  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    Lse g = reduce(p.constraints[i], r, is_constant, value);
    if (is_constant) {
      r.constants.emplace_back(static_cast<Index>(i), value);
    } else {
      r.constraints.push_back(std::move(g));
      r.origin.push_back({Origin::Kind::kProgram, static_cast<Index>(i)});
    }
  }
  for (std::size_t j = 0; j < r.free.size(); ++j) {
    const Index full = r.free[j];
    const Index red = static_cast<Index>(j);
    if (std::isfinite(p.lower[full])) {
      r.constraints.push_back(Lse::affine({{red, -1.0}}, p.lower[full]));
      r.origin.push_back({Origin::Kind::kLower, full});
    }
    if (std::isfinite(p.upper[full])) {
      r.constraints.push_back(Lse::affine({{red, 1.0}}, -p.upper[full]));
      r.origin.push_back({Origin::Kind::kUpper, full});
    }
  }
  return r;
}

struct Evaluation {
  double f0 = 0.0;
  VectorXd grad0;
  MatrixXd hess0;
  VectorXd f;
  std::vector<Lse::Local> d;
};

Evaluation evaluate(const Lse& objective, const std::vector<Lse>& cons, const VectorXd& x, bool hessian) {
  const Index n = x.size();
  Evaluation e;
  e.grad0 = VectorXd::Zero(n);
  if (hessian) e.hess0 = MatrixXd::Zero(n, n);
  if (!objective.empty()) {
    const Lse::Local l = objective.local_derivatives(x, hessian);
    e.f0 = l.value;
    const auto& s = objective.support();
    for (std::size_t a = 0; a < s.size(); ++a) {
      e.grad0[s[a]] += l.grad[static_cast<Index>(a)];
      if (hessian) {
        for (std::size_t b = 0; b < s.size(); ++b)
          e.hess0(s[a], s[b]) += l.hess(static_cast<Index>(a), static_cast<Index>(b));
      }
    }
  }
  e.f.resize(static_cast<Index>(cons.size()));
  e.d.reserve(cons.size());
  for (std::size_t i = 0; i < cons.size(); ++i) {
    e.d.push_back(cons[i].local_derivatives(x, hessian));
    e.f[static_cast<Index>(i)] = e.d.back().value;
  }
  return e;
}

VectorXd dual_residual(const Evaluation& e, const std::vector<Lse>& cons, const VectorXd& lambda) {
  VectorXd r = e.grad0;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const auto& s = cons[i].support();
    const double l = lambda[static_cast<Index>(i)];
    for (std::size_t a = 0; a < s.size(); ++a) r[s[a]] += l * e.d[i].grad[static_cast<Index>(a)];
  }
  return r;
}

double residual_norm(const Evaluation& e, const std::vector<Lse>& cons, const VectorXd& lambda, double t) {
  const VectorXd rd = dual_residual(e, cons, lambda);
  const VectorXd rc = (-lambda.array() * e.f.array() - 1.0 / t).matrix();
  return std::sqrt(rd.squaredNorm() + rc.squaredNorm());
}

bool strictly_feasible(const std::vector<Lse>& cons, const VectorXd& x) {
  for (const Lse& g : cons) {
    const double v = g.value(x);
    if (!(v < 0.0)) return false;
  }
  return true;
}

struct PrimalDualResult {
  VectorXd x;
  VectorXd lambda;
  int iterations = 0;
  bool converged = false;
};

// Primal-dual interior-point iterations for min f0 s.t. f_i <= 0 from a
// strictly feasible x. `stop_early` may end the run at any strictly feasible
// iterate.
PrimalDualResult primal_dual(const Lse& objective, const std::vector<Lse>& cons, VectorXd x,
                             const InteriorPointOptions& o,
                             const std::function<bool(const VectorXd&)>& stop_early) {
  const Index n = x.size();
  const Index m = static_cast<Index>(cons.size());
  PrimalDualResult out;

  Evaluation ev = evaluate(objective, cons, x, true);
  VectorXd lambda = (-1.0 / ev.f.array()).matrix();
  const double gap_tol = o.tol * 1e-2;

  for (int it = 0; it < o.max_iterations; ++it) {
    out.iterations = it;
    if (stop_early && stop_early(x)) {
      out.converged = true;
      break;
    }
    const double gap = -ev.f.dot(lambda);
    const VectorXd rd = dual_residual(ev, cons, lambda);
    if (rd.lpNorm<Eigen::Infinity>() <= o.tol && gap <= gap_tol) {
      out.converged = true;
      break;
    }
    const double t = o.mu * static_cast<double>(m) / gap;

    MatrixXd h = ev.hess0;
    VectorXd rhs = -ev.grad0;
    for (Index i = 0; i < m; ++i) {
      const auto& s = cons[static_cast<std::size_t>(i)].support();
      const Lse::Local& d = ev.d[static_cast<std::size_t>(i)];
      const double fi = ev.f[i];
      const double li = lambda[i];
      const double w = -li / fi;
      for (std::size_t a = 0; a < s.size(); ++a) {
        const Index ia = static_cast<Index>(a);
        rhs[s[a]] += d.grad[ia] / (t * fi);
        for (std::size_t b = 0; b < s.size(); ++b) {
          const Index ib = static_cast<Index>(b);
          double v = w * d.grad[ia] * d.grad[ib];
          if (d.hess.size() > 0) v += li * d.hess(ia, ib);
          h(s[a], s[b]) += v;
        }
      }
    }

    Eigen::LDLT<MatrixXd> ldlt(h);
    VectorXd dx = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
      const double reg = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
      h.diagonal().array() += reg;
      dx = h.ldlt().solve(rhs);
      if (!dx.allFinite()) break;
    }

    VectorXd dlambda(m);
    for (Index i = 0; i < m; ++i) {
      const auto& s = cons[static_cast<std::size_t>(i)].support();
      const Lse::Local& d = ev.d[static_cast<std::size_t>(i)];
      double gdx = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) gdx += d.grad[static_cast<Index>(a)] * dx[s[a]];
      const double rc = -lambda[i] * ev.f[i] - 1.0 / t;
      dlambda[i] = (rc - lambda[i] * gdx) / ev.f[i];
    }

    double step = 1.0;
    for (Index i = 0; i < m; ++i) {
      if (dlambda[i] < 0.0) step = std::min(step, -lambda[i] / dlambda[i]);
    }
    step *= 0.99;

    const double r0 = residual_norm(ev, cons, lambda, t);
    VectorXd x_new;
    VectorXd lambda_new;
    Evaluation ev_new;
    bool accepted = false;
    while (step > 1e-16) {
      x_new = x + step * dx;
      if (strictly_feasible(cons, x_new)) break;
      step *= o.backtrack;
    }
    while (step > 1e-16) {
      x_new = x + step * dx;
      lambda_new = lambda + step * dlambda;
      ev_new = evaluate(objective, cons, x_new, false);
      if (residual_norm(ev_new, cons, lambda_new, t) <= (1.0 - o.armijo * step) * r0) {
        accepted = true;
        break;
      }
      step *= o.backtrack;
    }
    if (!accepted) break;
    x = x_new;
    lambda = lambda_new;
    ev = evaluate(objective, cons, x, true);
    out.iterations = it + 1;
  }
  if (!out.converged) {
    const double gap = -ev.f.dot(lambda);
    const VectorXd rd = dual_residual(ev, cons, lambda);
    out.converged = rd.lpNorm<Eigen::Infinity>() <= o.tol && gap <= o.tol;
  }
  out.x = std::move(x);
  out.lambda = std::move(lambda);
  (void)n;
  return out;
}

Lse with_slack(const Lse& g, Index slack) {
  std::vector<Index> support = g.support();
  support.push_back(slack);
  MatrixXd a(g.terms(), static_cast<Index>(support.size()));
  a.leftCols(g.exponents().cols()) = g.exponents();
  a.col(a.cols() - 1).setConstant(-1.0);
  return Lse(std::move(support), std::move(a), g.log_coeffs());
}

Lse shifted(const Lse& g, double shift) {
  return Lse(g.support(), g.exponents(), (g.log_coeffs().array() - shift).matrix());
}

std::string describe(const ConvexProgram& p, const Origin& o) {
  switch (o.kind) {
    case Origin::Kind::kProgram:
      return p.constraint_names.at(static_cast<std::size_t>(o.index));
    case Origin::Kind::kLower:
      return "lower bound on " + p.variable_names.at(static_cast<std::size_t>(o.index));
    case Origin::Kind::kUpper:
      return "upper bound on " + p.variable_names.at(static_cast<std::size_t>(o.index));
  }
  return {};
}

}  // namespace

KktResiduals kkt_residuals(const ConvexProgram& p, const ConvexSolution& s) {
  KktResiduals r;
  const Index n = p.size();
  VectorXd grad = p.objective.gradient(s.x);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const double g = p.constraints[i].value(s.x);
    const double l = s.multipliers[static_cast<Index>(i)];
    grad += l * p.constraints[i].gradient(s.x);
    r.primal_infeasibility = std::max(r.primal_infeasibility, g);
    r.complementarity = std::max(r.complementarity, std::abs(l * g));
  }
  for (Index k = 0; k < n; ++k) {
    r.primal_infeasibility = std::max({r.primal_infeasibility, p.lower[k] - s.x[k], s.x[k] - p.upper[k]});
    if (p.lower[k] == p.upper[k]) continue;
    grad[k] += s.upper_multipliers[k] - s.lower_multipliers[k];
    r.complementarity = std::max({r.complementarity, std::abs(s.lower_multipliers[k] * (s.x[k] - p.lower[k])),
                                  std::abs(s.upper_multipliers[k] * (p.upper[k] - s.x[k]))});
    r.stationarity = std::max(r.stationarity, std::abs(grad[k]));
  }
  r.primal_infeasibility = std::max(r.primal_infeasibility, 0.0);
  return r;
}

ConvexSolution solve_convex(const ConvexProgram& p, const InteriorPointOptions& options,
                            const std::optional<VectorXd>& start) {
  const Index n = p.size();
  ConvexSolution out;
  out.multipliers = VectorXd::Zero(static_cast<Index>(p.constraints.size()));
  out.lower_multipliers = VectorXd::Zero(n);
  out.upper_multipliers = VectorXd::Zero(n);

  for (Index k = 0; k < n; ++k) {
    if (!(p.lower[k] <= p.upper[k])) {
      out.status = SolveStatus::kInfeasible;
      out.most_violated = "empty box on " + p.variable_names[static_cast<std::size_t>(k)];
      out.max_violation = p.lower[k] - p.upper[k];
      out.x = p.lower;
      return out;
    }
  }

  Reduced r = reduce_program(p);
  const Index nr = static_cast<Index>(r.free.size());

  auto assemble = [&](const VectorXd& xr) {
    VectorXd x = r.fixed_x;
    for (Index j = 0; j < nr; ++j) x[r.free[static_cast<std::size_t>(j)]] = xr[j];
    return x;
  };

  for (const auto& [index, value] : r.constants) {
    if (value > options.infeasibility_tol && value > out.max_violation) {
      out.status = SolveStatus::kInfeasible;
      out.max_violation = value;
      out.most_violated = p.constraint_names[static_cast<std::size_t>(index)];
    }
  }

  VectorXd xr(nr);
  for (Index j = 0; j < nr; ++j) {
    const Index full = r.free[static_cast<std::size_t>(j)];
    const double lo = p.lower[full], hi = p.upper[full];
    double v = start ? (*start)[full] : 0.5 * (lo + hi);
    // Start strictly inside the box.
    const double margin = 1e-3 * (hi - lo);
    v = std::clamp(v, lo + margin, hi - margin);
    xr[j] = v;
  }

  if (out.status == SolveStatus::kInfeasible) {
    out.x = assemble(xr);
    return out;
  }

  // Phase I: minimize s subject to f_i(x) <= s.
  std::vector<Lse> cons = r.constraints;
  if (!cons.empty() && !strictly_feasible(cons, xr)) {
    std::vector<Lse> relaxed;
    relaxed.reserve(cons.size());
    for (const Lse& g : cons) relaxed.push_back(with_slack(g, nr));
    double worst = -kInf;
    for (const Lse& g : cons) worst = std::max(worst, g.value(xr));
    VectorXd xs(nr + 1);
    xs.head(nr) = xr;
    xs[nr] = worst + 1.0;
    const Lse phase1_objective = Lse::affine({{nr, 1.0}}, 0.0);
    InteriorPointOptions o1 = options;
    o1.tol = std::min(options.tol, 1e-9);
    const PrimalDualResult ph1 = primal_dual(phase1_objective, relaxed, xs, o1,
                                             [nr](const VectorXd& v) { return v[nr] < -1e-2; });
    out.phase1_iterations = ph1.iterations;
    xr = ph1.x.head(nr);
    const double s = ph1.x[nr];
    if (s > options.infeasibility_tol && !ph1.converged) {
      // ran out of iterations before deciding feasibility
      out.status = SolveStatus::kIterationLimit;
      out.x = assemble(xr);
      out.iterations = ph1.iterations;
      return out;
    }
    if (s > options.infeasibility_tol) {
      out.status = SolveStatus::kInfeasible;
      Index worst_i = 0;
      double worst_v = -kInf;
      for (std::size_t i = 0; i < cons.size(); ++i) {
        const double v = cons[i].value(xr);
        if (v > worst_v) {
          worst_v = v;
          worst_i = static_cast<Index>(i);
        }
      }
      out.max_violation = worst_v;
      out.most_violated = describe(p, r.origin[static_cast<std::size_t>(worst_i)]);
      out.x = assemble(xr);
      out.iterations = ph1.iterations;
      return out;
    }
    if (!strictly_feasible(cons, xr) || s > -1e-9) {
      // Feasible set without (numerical) interior: relax every constraint by
      // a small shift so that the phase-I point is strictly inside.
      out.relaxation = std::max(s, 0.0) + 1e-8;
      for (Lse& g : cons) g = shifted(g, out.relaxation);
      if (!strictly_feasible(cons, xr)) {
        out.status = SolveStatus::kInfeasible;
        out.most_violated = "no strictly feasible point found";
        out.x = assemble(xr);
        return out;
      }
    }
  }

  VectorXd lambda = VectorXd::Zero(static_cast<Index>(cons.size()));
  bool converged = true;
  if (!r.objective.empty() && nr > 0) {
    const PrimalDualResult ph2 = primal_dual(r.objective, cons, xr, options, nullptr);
    xr = ph2.x;
    lambda = ph2.lambda;
    out.iterations = ph2.iterations;
    converged = ph2.converged;
  }

  out.x = assemble(xr);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const Origin& o = r.origin[i];
    const double l = lambda[static_cast<Index>(i)];
    switch (o.kind) {
      case Origin::Kind::kProgram:
        out.multipliers[o.index] = l;
        break;
      case Origin::Kind::kLower:
        out.lower_multipliers[o.index] = l;
        break;
      case Origin::Kind::kUpper:
        out.upper_multipliers[o.index] = l;
        break;
    }
  }
  out.objective = p.objective.value(out.x);
  const KktResiduals k = kkt_residuals(p, out);
  out.stationarity = k.stationarity;
  out.primal_infeasibility = k.primal_infeasibility;
  out.complementarity = k.complementarity;
  out.status = converged ? SolveStatus::kOptimal : SolveStatus::kIterationLimit;
  return out;
}

}  // namespace ogf
