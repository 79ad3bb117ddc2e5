#include "stowardrop/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Dense>

#include "stowardrop/errors.hpp"
#include "stowardrop/rng.hpp"
#include "stowardrop/simplex.hpp"

namespace stowardrop {
namespace {

using Matrix = std::vector<std::vector<double>>;

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      s += a[i][k] * b[i][k];
    }
  }
  return s;
}

Matrix difference(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      out[i][k] -= b[i][k];
    }
  }
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const auto& row : a) {
    for (double x : row) {
      m = std::max(m, std::abs(x));
    }
  }
  return m;
}

// P(p - step * direction), row by row.
Strategy projected_step(const Strategy& p, const Matrix& direction, double step) {
  Strategy out = p;
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    for (std::size_t k = 0; k < out.p[i].size(); ++k) {
      out.p[i][k] -= step * direction[i][k];
    }
    project_to_simplex(out.p[i]);
  }
  return out;
}

Strategy moved(const Strategy& p, const Matrix& direction, double alpha) {
  Strategy out = p;
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < out.p[i].size(); ++k) {
      out.p[i][k] = std::max(0.0, out.p[i][k] + alpha * direction[i][k]);
      sum += out.p[i][k];
    }
    for (double& x : out.p[i]) {
      x /= sum;
    }
  }
  return out;
}

bool all_affine(const Network& network) {
  return std::all_of(network.edges().begin(), network.edges().end(),
                     [](const Edge& e) { return e.cost.is_affine(); });
}

std::vector<double> demand_means(const Network& network) {
  std::vector<double> d;
  for (const auto& od : network.od_pairs()) {
    d.push_back(od.demand.mean());
  }
  return d;
}

struct GapAt {
  GapMeasure gap;
  Matrix path_costs;
  std::vector<double> min_cost;
};

GapAt gap_at(const CostModel& model, const FlowEvaluation& flows, const Strategy& p) {
  GapAt out;
  out.path_costs = model.expected_path_costs(flows);
  const auto& ods = model.network().od_pairs();
  double numerator = 0.0;
  double denominator = 0.0;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < ods.size(); ++i) {
    const auto& c = out.path_costs[i];
    const double pi = *std::min_element(c.begin(), c.end());
    double mixed = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      mixed += p.p[i][k] * c[k];
      any_nonzero = any_nonzero || c[k] != 0.0;
    }
    const double d = ods[i].demand.mean();
    numerator += d * std::max(0.0, mixed - pi);
    denominator += d * pi;
    out.min_cost.push_back(pi);
  }
  if (!any_nonzero) {
    throw DegenerateCost("every expected path cost is zero; the equilibrium gap is undefined");
  }
  if (denominator < 1e-12) {
    out.gap = {numerator, true};
  } else {
    out.gap = {numerator / denominator, false};
  }
  return out;
}

Matrix scaled_by_demand(const Matrix& path_costs, const std::vector<double>& d) {
  Matrix out = path_costs;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (double& x : out[i]) {
      x *= d[i];
    }
  }
  return out;
}

EquilibriumResult finish(const CostModel& model, Strategy p, const GapAt& at, int iterations, bool converged,
                         StepRule rule) {
  EquilibriumResult r;
  r.total_cost = model.expected_total_cost(p);
  r.strategy = std::move(p);
  r.gap = at.gap;
  r.iterations = iterations;
  r.converged = converged;
  r.step_rule = rule;
  r.min_path_cost = at.min_cost;
  return r;
}

EquilibriumResult run_beckmann(const CostModel& model, const SolverConfig& config, Strategy p) {
  const Network& net = model.network();
  const std::vector<double> d = demand_means(net);
  std::vector<double> slope_of_edge;
  for (const auto& e : net.edges()) {
    slope_of_edge.push_back(e.cost.coefficient(1));
  }
  double step = 0.0;
  Matrix prev_grad;
  Strategy prev_p;
  for (int it = 0;; ++it) {
    const FlowEvaluation flows = model.evaluate(p);
    const GapAt at = gap_at(model, flows, p);
    if (at.gap.value <= config.relative_gap_tolerance) {
      return finish(model, std::move(p), at, it, true, StepRule::exact_line_search_affine);
    }
    if (it >= config.max_iterations) {
      return finish(model, std::move(p), at, it, false, StepRule::exact_line_search_affine);
    }
    const Matrix grad = scaled_by_demand(at.path_costs, d);
    if (it == 0) {
      step = 1.0 / std::max(max_abs(grad), 1e-300);
    } else {
      const Matrix dp = difference(p.p, prev_p.p);
      const double sy = dot(dp, difference(grad, prev_grad));
      if (sy > 0.0) {
        step = std::clamp(dot(dp, dp) / sy, 1e-12, 1e12);
      } else {
        step *= 2.0;
      }
    }
    const Strategy target = projected_step(p, grad, step);
    const Matrix dir = difference(target.p, p.p);
    // Exact minimizer of the quadratic potential along dir.
    std::vector<double> dv(net.edge_count(), 0.0);
    for (std::size_t i = 0; i < dir.size(); ++i) {
      for (std::size_t k = 0; k < dir[i].size(); ++k) {
        for (EdgeIndex e : net.paths(i)[k]) {
          dv[e] += dir[i][k] * d[i];
        }
      }
    }
    const double slope = dot(grad, dir);
    double curvature = 0.0;
    for (EdgeIndex e = 0; e < dv.size(); ++e) {
      curvature += slope_of_edge[e] * dv[e] * dv[e];
    }
    if (!(slope < 0.0)) {
      return finish(model, std::move(p), at, it, false, StepRule::exact_line_search_affine);
    }
    const double alpha = curvature > 0.0 ? std::min(1.0, -slope / curvature) : 1.0;
    prev_p = p;
    prev_grad = grad;
    p = alpha == 1.0 ? target : moved(p, dir, alpha);
  }
}

constexpr double kPolishFactor = 1e-6;
constexpr int kPolishIterations = 500;

EquilibriumResult run_extragradient(const CostModel& model, const SolverConfig& config, Strategy p) {
  const std::vector<double> d = demand_means(model.network());
  constexpr double kContraction = 0.9;
  double beta = 0.0;
  // The gap shrinks quadratically with the distance to an equilibrium on the
  // boundary, so keep polishing for a while once the tolerance is met.
  const double polish_target = config.relative_gap_tolerance * kPolishFactor;
  int polish_left = kPolishIterations;
  for (int it = 0;; ++it) {
    const FlowEvaluation flows = model.evaluate(p);
    const GapAt at = gap_at(model, flows, p);
    const bool met = at.gap.value <= config.relative_gap_tolerance;
    if (at.gap.value <= polish_target || it >= config.max_iterations || (met && polish_left-- <= 0)) {
      return finish(model, std::move(p), at, it, met, StepRule::armijo);
    }
    const Matrix fp = scaled_by_demand(at.path_costs, d);
    if (it == 0) {
      beta = 1.0 / std::max(max_abs(fp), 1e-300);
    }
    Strategy y;
    Matrix fy;
    bool accepted = false;
    double ratio = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      y = projected_step(p, fp, beta);
      const Matrix py = difference(p.p, y.p);
      const double dist = std::sqrt(dot(py, py));
      fy = scaled_by_demand(model.expected_path_costs(model.evaluate(y)), d);
      if (dist == 0.0) {
        accepted = true;
        break;
      }
      const Matrix df = difference(fp, fy);
      ratio = beta * std::sqrt(dot(df, df)) / dist;
      if (ratio <= kContraction) {
        accepted = true;
        break;
      }
      beta *= std::max(0.1, 0.5 * kContraction / ratio);
    }
    if (!accepted) {
      return finish(model, std::move(p), at, it, met, StepRule::armijo);
    }
    p = projected_step(p, fy, beta);
    if (ratio < 0.3) {
      beta *= 1.5;
    }
  }
}

EquilibriumResult run_msa(const CostModel& model, const SolverConfig& config, Strategy p) {
  for (int it = 0;; ++it) {
    const FlowEvaluation flows = model.evaluate(p);
    const GapAt at = gap_at(model, flows, p);
    if (at.gap.value <= config.relative_gap_tolerance) {
      return finish(model, std::move(p), at, it, true, StepRule::msa);
    }
    if (it >= config.max_iterations) {
      return finish(model, std::move(p), at, it, false, StepRule::msa);
    }
    const double alpha = 1.0 / static_cast<double>(it + 2);
    for (std::size_t i = 0; i < p.p.size(); ++i) {
      const auto& c = at.path_costs[i];
      // lowest index among minimum-cost paths
      const std::size_t best = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
      for (std::size_t k = 0; k < p.p[i].size(); ++k) {
        p.p[i][k] = (1.0 - alpha) * p.p[i][k] + (k == best ? alpha : 0.0);
      }
    }
  }
}

StepRule resolve_rule(const Network& network, StepRule requested) {
  const bool affine = all_affine(network);
  if (requested == StepRule::automatic) {
    return affine ? StepRule::exact_line_search_affine : StepRule::armijo;
  }
  if (requested == StepRule::exact_line_search_affine && !affine) {
    throw ValidationError("exact_line_search_affine needs every cost to be affine");
  }
  return requested;
}

// Iterates approach an equilibrium on a face of the simplex only
// geometrically; drop tiny, non-minimal paths and keep the result if the gap
// does not grow.
void snap_to_support(const CostModel& model, const SolverConfig& config, EquilibriumResult& r) {
  if (r.gap.value == 0.0) {
    return;
  }
  constexpr double kSnap = 1e-3;
  const FlowEvaluation flows = model.evaluate(r.strategy);
  const Matrix costs = model.expected_path_costs(flows);
  Strategy q = r.strategy;
  bool changed = false;
  for (std::size_t i = 0; i < q.p.size(); ++i) {
    const double pi = *std::min_element(costs[i].begin(), costs[i].end());
    double kept = 0.0;
    for (std::size_t k = 0; k < q.p[i].size(); ++k) {
      if (q.p[i][k] > 0.0 && q.p[i][k] <= kSnap && costs[i][k] > pi) {
        q.p[i][k] = 0.0;
        changed = true;
      }
      kept += q.p[i][k];
    }
    for (double& x : q.p[i]) {
      x /= kept;
    }
  }
  if (!changed) {
    return;
  }
  const GapAt at = gap_at(model, model.evaluate(q), q);
  if (at.gap.value <= r.gap.value) {
    const bool converged = r.converged || at.gap.value <= config.relative_gap_tolerance;
    r = finish(model, std::move(q), at, r.iterations, converged, r.step_rule);
  }
}

}  // namespace

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::automatic:
      return "auto";
    case StepRule::msa:
      return "msa";
    case StepRule::exact_line_search_affine:
      return "exact_line_search_affine";
    case StepRule::armijo:
      return "armijo";
  }
  return "auto";
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "auto") return StepRule::automatic;
  if (name == "msa") return StepRule::msa;
  if (name == "exact_line_search_affine") return StepRule::exact_line_search_affine;
  if (name == "armijo") return StepRule::armijo;
  throw ValidationError("unknown step rule '" + name + "'");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) {
    throw ValidationError("max_iterations must be at least 1");
  }
  if (!(relative_gap_tolerance > 0.0) || !(so_gradient_tolerance > 0.0)) {
    throw ValidationError("solver tolerances must be positive");
  }
  if (restarts < 0) {
    throw ValidationError("restarts must be nonnegative");
  }
}

GapMeasure ue_gap(const CostModel& model, const Strategy& strategy) {
  return gap_at(model, model.evaluate(strategy), strategy).gap;
}

double ue_gap(const Strategy& strategy, const Network& network) {
  return ue_gap(CostModel(network), strategy).value;
}

Strategy random_strategy(const Network& network, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Strategy s;
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    std::vector<double> row;
    double sum = 0.0;
    for (std::size_t k = 0; k < network.paths(i).size(); ++k) {
      row.push_back(-std::log(rng.uniform01()));
      sum += row.back();
    }
    for (double& x : row) {
      x /= sum;
    }
    s.p.push_back(std::move(row));
  }
  return s;
}

EquilibriumResult solve_ue_from(const CostModel& model, const SolverConfig& config, Strategy start) {
  config.validate();
  validate_strategy(model.network(), start);
  EquilibriumResult r;
  switch (resolve_rule(model.network(), config.step_rule)) {
    case StepRule::exact_line_search_affine:
      r = run_beckmann(model, config, std::move(start));
      break;
    case StepRule::msa:
      r = run_msa(model, config, std::move(start));
      break;
    default:
      r = run_extragradient(model, config, std::move(start));
      break;
  }
  snap_to_support(model, config, r);
  return r;
}

EquilibriumResult solve_ue(const Network& network, const SolverConfig& config, const std::optional<Strategy>& warm_start) {
  config.validate();
  const CostModel model(network);
  EquilibriumResult primary = solve_ue_from(model, config, warm_start ? *warm_start : Strategy::uniform(network));

  std::vector<EquilibriumResult> runs;
  runs.push_back(primary);
  for (int r = 0; r < config.restarts; ++r) {
    runs.push_back(solve_ue_from(model, config, random_strategy(network, config.seed, static_cast<std::uint64_t>(r))));
  }

  EquilibriumDiagnostics diag;
  diag.starts = static_cast<int>(runs.size());
  const EquilibriumResult* worst = nullptr;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& run : runs) {
    if (!run.converged) {
      continue;
    }
    ++diag.converged_starts;
    lo = std::min(lo, run.total_cost);
    if (run.total_cost > hi) {
      hi = run.total_cost;
      worst = &run;
    }
  }
  if (worst == nullptr) {
    worst = &runs.front();
    lo = hi = worst->total_cost;
  }
  diag.min_total_cost = lo;
  diag.max_total_cost = hi;
  diag.dispersion = hi > 0.0 ? (hi - lo) / hi : 0.0;
  diag.worst_strategy = worst->strategy;
  primary.diagnostics = std::move(diag);
  return primary;
}

double projected_gradient_norm(const Strategy& strategy, const std::vector<std::vector<double>>& grad) {
  const Strategy target = projected_step(strategy, grad, 1.0);
  const Matrix diff = difference(target.p, strategy.p);
  return std::sqrt(dot(diff, diff));
}

namespace {

struct SpgRun {
  Strategy p;
  double value = 0.0;
  double pg_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

SpgRun run_spg(const CostModel& model, const SolverConfig& config, Strategy p) {
  constexpr std::size_t kMemory = 10;
  constexpr double kSufficient = 1e-4;
  constexpr double kStepMin = 1e-30;
  constexpr double kStepMax = 1e10;
  constexpr double kRoundoff = 1e-10;

  double f = model.expected_total_cost(p);
  Matrix g = model.total_cost_gradient(p);
  double pg = projected_gradient_norm(p, g);
  std::deque<double> history{f};
  double lambda = 1.0;
  {
    const Strategy t = projected_step(p, g, 1.0);
    const double inf_norm = max_abs(difference(t.p, p.p));
    if (inf_norm > 0.0) {
      lambda = std::clamp(1.0 / inf_norm, kStepMin, kStepMax);
    }
  }

  SpgRun run;
  int it = 0;
  // Stalls are left to the Newton polish.
  constexpr int kStallWindow = 300;
  double best_pg = pg;
  int best_at = 0;
  for (; it < config.max_iterations; ++it) {
    if (pg <= config.so_gradient_tolerance) {
      break;
    }
    if (pg < 0.5 * best_pg) {
      best_pg = pg;
      best_at = it;
    } else if (it - best_at > kStallWindow) {
      break;
    }
    const Strategy target = projected_step(p, g, lambda);
    const Matrix dir = difference(target.p, p.p);
    const double gd = dot(g, dir);
    const double f_ref = *std::max_element(history.begin(), history.end());

    Strategy trial;
    double f_trial = 0.0;
    Matrix g_trial;
    bool accepted = false;
    // Below this slope the sufficient-decrease test compares round-off.
    const bool resolvable = std::abs(gd) > kRoundoff * std::max(1.0, std::abs(f));
    for (double alpha = 1.0; resolvable && alpha > 1e-20;) {
      trial = alpha == 1.0 ? target : moved(p, dir, alpha);
      f_trial = model.expected_total_cost(trial);
      if (f_trial <= f_ref + kSufficient * alpha * gd) {
        accepted = true;
        break;
      }
      const double denom = 2.0 * (f_trial - f - alpha * gd);
      const double next = denom > 0.0 ? -gd * alpha * alpha / denom : 0.5 * alpha;
      alpha = std::clamp(next, 0.1 * alpha, 0.5 * alpha);
    }
    if (accepted) {
      g_trial = model.total_cost_gradient(trial);
    } else {
      // Search on the sign of the directional derivative, which stays accurate
      // after function differences have drowned in round-off.
      auto slope_at = [&](double a, Strategy& at, Matrix& grad) {
        at = a == 1.0 ? target : moved(p, dir, a);
        grad = model.total_cost_gradient(at);
        return dot(grad, dir);
      };
      if (slope_at(1.0, trial, g_trial) <= 0.0) {
        accepted = true;
      } else {
        double lo = 0.0;
        double hi = 1.0;
        Strategy mid_p;
        Matrix mid_g;
        for (int k = 0; k < 60; ++k) {
          const double mid = 0.5 * (lo + hi);
          if (slope_at(mid, mid_p, mid_g) <= 0.0) {
            lo = mid;
            trial = mid_p;
            g_trial = mid_g;
          } else {
            hi = mid;
          }
        }
        accepted = lo > 0.0;
      }
      if (!accepted) {
        break;
      }
      f_trial = model.expected_total_cost(trial);
    }

    const Matrix s = difference(trial.p, p.p);
    const Matrix y = difference(g_trial, g);
    const double sy = dot(s, y);
    lambda = sy > 0.0 ? std::clamp(dot(s, s) / sy, kStepMin, kStepMax) : kStepMax;

    p = std::move(trial);
    f = f_trial;
    g = std::move(g_trial);
    pg = projected_gradient_norm(p, g);
    history.push_back(f);
    if (history.size() > kMemory) {
      history.pop_front();
    }
  }
  run.value = model.expected_total_cost(p);
  run.pg_norm = pg;
  run.converged = pg <= config.so_gradient_tolerance;
  run.iterations = it;
  run.p = std::move(p);
  return run;
}

// Projected Newton on the free paths. SPG crawls when many path splits give
// the same link flows; a reduced Newton step with a pseudo-inverse does not.
void newton_polish(const CostModel& model, const SolverConfig& config, SpgRun& run) {
  constexpr int kIterations = 100;
  constexpr double kFd = 1e-6;
  constexpr double kSufficient = 1e-4;
  constexpr double kRoundoff = 1e-10;

  Strategy p = run.p;
  double f = model.expected_total_cost(p);
  Matrix g = model.total_cost_gradient(p);
  double pg = projected_gradient_norm(p, g);
  int it = 0;
  for (; it < kIterations && pg > config.so_gradient_tolerance; ++it) {
    // Per commodity: pivot = largest share; other paths free unless at zero with a larger gradient.
    std::vector<std::size_t> pivot(p.p.size());
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t i = 0; i < p.p.size(); ++i) {
      pivot[i] = static_cast<std::size_t>(std::max_element(p.p[i].begin(), p.p[i].end()) - p.p[i].begin());
      for (std::size_t k = 0; k < p.p[i].size(); ++k) {
        if (k != pivot[i] && (p.p[i][k] > 0.0 || g[i][k] < g[i][pivot[i]])) {
          free.emplace_back(i, k);
        }
      }
    }
    if (free.empty()) {
      break;
    }
    const std::size_t n = free.size();
    auto basis = [&](std::size_t a, double scale) {
      Matrix z(p.p.size());
      for (std::size_t i = 0; i < p.p.size(); ++i) {
        z[i].assign(p.p[i].size(), 0.0);
      }
      const auto [i, k] = free[a];
      z[i][k] = scale;
      z[i][pivot[i]] = -scale;
      return z;
    };
    // Forward differences stay feasible: the pivot holds at least 1/K of the mass.
    std::vector<Matrix> hz(n);
    for (std::size_t a = 0; a < n; ++a) {
      const Matrix dz = basis(a, kFd);
      Strategy q = p;
      for (std::size_t i = 0; i < q.p.size(); ++i) {
        for (std::size_t k = 0; k < q.p[i].size(); ++k) {
          q.p[i][k] = std::max(0.0, q.p[i][k] + dz[i][k]);
        }
      }
      hz[a] = difference(model.total_cost_gradient(q), g);
      for (auto& row : hz[a]) {
        for (double& x : row) {
          x /= kFd;
        }
      }
    }
    Eigen::MatrixXd reduced(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t a = 0; a < n; ++a) {
      const Matrix za = basis(a, 1.0);
      rhs(a) = -dot(za, g);
      for (std::size_t b = 0; b < n; ++b) {
        reduced(a, b) = dot(za, hz[b]);
      }
    }
    const Eigen::MatrixXd sym = 0.5 * (reduced + reduced.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(top > 0.0)) {
      break;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(n); ++c) {
      const double lam = std::abs(eig.eigenvalues()(c));
      if (lam > 1e-9 * top) {
        const auto v = eig.eigenvectors().col(c);
        y += v * (v.dot(rhs) / lam);
      }
    }
    Matrix dir(p.p.size());
    for (std::size_t i = 0; i < p.p.size(); ++i) {
      dir[i].assign(p.p[i].size(), 0.0);
    }
    for (std::size_t a = 0; a < n; ++a) {
      const auto [i, k] = free[a];
      dir[i][k] += y(static_cast<Eigen::Index>(a));
      dir[i][pivot[i]] -= y(static_cast<Eigen::Index>(a));
    }
    const double gd = dot(g, dir);
    if (!(gd < 0.0)) {
      break;
    }
    double alpha = 1.0;
    for (std::size_t i = 0; i < p.p.size(); ++i) {
      for (std::size_t k = 0; k < p.p[i].size(); ++k) {
        if (dir[i][k] < 0.0) {
          alpha = std::min(alpha, p.p[i][k] / -dir[i][k]);
        }
      }
    }
    bool accepted = false;
    Strategy trial;
    double f_trial = 0.0;
    Matrix g_trial;
    const bool resolvable = std::abs(gd) > kRoundoff * std::max(1.0, std::abs(f));
    for (int halving = 0; halving < 40 && alpha > 0.0; ++halving, alpha *= 0.5) {
      trial = moved(p, dir, alpha);
      f_trial = model.expected_total_cost(trial);
      g_trial = model.total_cost_gradient(trial);
      if (resolvable ? f_trial <= f + kSufficient * alpha * gd : dot(g_trial, dir) <= 0.0 || f_trial <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      break;
    }
    p = std::move(trial);
    f = f_trial;
    g = std::move(g_trial);
    pg = projected_gradient_norm(p, g);
  }
  if (f <= run.value || pg < run.pg_norm) {
    run.p = std::move(p);
    run.value = f;
    run.pg_norm = pg;
    run.iterations += it;
    run.converged = pg <= config.so_gradient_tolerance;
  }
}

}  // namespace

OptimumResult solve_so(const Network& network, const SolverConfig& config, const std::vector<Strategy>& extra_starts) {
  config.validate();
  const CostModel model(network);
  std::vector<Strategy> starts{Strategy::uniform(network)};
  for (int r = 0; r < config.restarts; ++r) {
    starts.push_back(random_strategy(network, config.seed ^ 0x5eed5eedULL, static_cast<std::uint64_t>(r)));
  }
  for (const auto& s : extra_starts) {
    validate_strategy(network, s);
    starts.push_back(s);
  }

  OptimumResult best;
  bool have = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    SpgRun run = run_spg(model, config, starts[idx]);
    if (!run.converged) {
      newton_polish(model, config, run);
    }
    if (run.converged) {
      lo = std::min(lo, run.value);
      hi = std::max(hi, run.value);
    }
    if (!have || run.value < best.total_cost) {
      have = true;
      best.strategy = std::move(run.p);
      best.total_cost = run.value;
      best.projected_gradient_norm = run.pg_norm;
      best.iterations = run.iterations;
      best.converged = run.converged;
      best.best_start = static_cast<int>(idx);
    }
  }
  best.restarts_used = static_cast<int>(starts.size()) - 1;
  best.best_of_restarts = best.restarts_used > 0;
  best.local_optimum_risk = std::isfinite(lo) && hi - lo > 1e-6 * std::max(std::abs(lo), 1e-300);
  return best;
}

}  // namespace stowardrop
