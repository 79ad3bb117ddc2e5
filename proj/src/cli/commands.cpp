#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "stowardrop/bounds.hpp"
#include "stowardrop/cli.hpp"
#include "stowardrop/costs.hpp"
#include "stowardrop/errors.hpp"
#include "stowardrop/moments.hpp"
#include "stowardrop/numeric.hpp"

namespace stowardrop::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { line(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) {
      throw std::logic_error("csv row width mismatch");
    }
    line(cells);
  }

  void row(const std::vector<double>& cells) {
    std::vector<std::string> text;
    for (double x : cells) {
      text.push_back(format_csv_number(x));
    }
    row(text);
  }

  [[nodiscard]] std::string str() const { return os_.str(); }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      os_ << (k ? "," : "") << cells[k];
    }
    os_ << '\n';
  }

  std::size_t width_;
  std::ostringstream os_;
};

struct Emitter {
  std::ostream& out;
  std::string path;

  void operator()(const std::string& text) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      throw ValidationError(path + ": cannot write output file");
    }
    file << text;
  }

  void operator()(const json& doc) const { (*this)(doc.dump(2) + "\n"); }
};

// Two links o -> t: upper has constant cost `upper`, lower has x^j.
Network two_link(int j, double upper, double theta, double d) {
  NetworkBuilder b;
  b.add_node("o");
  b.add_node("t");
  b.add_edge("upper", "o", "t", PolynomialCost({upper}));
  b.add_edge("lower", "o", "t", PolynomialCost::monomial(j, 1.0));
  b.add_od_pair("od", "o", "t", DemandDistribution::normal(d, theta * d));
  return b.build();
}

std::string reproduce_two_link(int j, double theta, double d, const SolverConfig& config) {
  if (j < 1) {
    throw ValidationError("--j must be at least 1");
  }
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw ValidationError("--theta must be a finite nonnegative number");
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ValidationError("--d must be positive");
  }
  const double t2 = theta * theta;
  const double gj = normal_moment_factor(j, t2);
  const double gj1 = normal_moment_factor(j + 1, t2);
  const double dj1 = std::pow(d, j + 1);

  // Lower link alone is an equilibrium; the optimum equalizes marginal costs.
  const double so_share = std::min(1.0, std::pow(gj / (gj1 * (j + 1.0)), 1.0 / j));
  const double ue_cost = gj1 * dj1;
  const double so_cost = dj1 * ((1.0 - so_share) * gj + std::pow(so_share, j + 1) * gj1);

  const PoAReport r = compute_poa(two_link(j, gj * std::pow(d, j), theta, d), config);
  const std::size_t lower = 1;

  CsvTable t({"quantity", "closed_form", "solver", "abs_error"});
  auto add = [&](const std::string& name, double closed, double solved) {
    t.row({name, format_csv_number(closed), format_csv_number(solved), format_csv_number(std::abs(closed - solved))});
  };
  add("ue_lower_share", 1.0, r.ue.strategy.p[0][lower]);
  add("so_lower_share", so_share, r.so.strategy.p[0][lower]);
  add("ue_total_cost", ue_cost, r.ue_total_cost);
  add("so_total_cost", so_cost, r.so_total_cost);
  add("poa", ue_cost / so_cost, r.poa);
  if (j == 1) {
    add("affine_bound", affine_bound(theta, theta, 1.0), r.find_bound("affine")->report.value);
  } else {
    const BoundCheck* b = r.find_bound("polynomial_normal");
    add("normal_bound", gamma_normal(j, normal_stats(theta, theta, j + 1), 1.0).value,
        b ? b->report.value : std::numeric_limits<double>::quiet_NaN());
  }
  return t.str();
}

std::string reproduce_table1() {
  CsvTable t({"m", "threshold"});
  for (int m : {2, 3, 4}) {
    t.row(std::vector<double>{static_cast<double>(m), positive_threshold(m)});
  }
  return t.str();
}

std::string reproduce_table2() {
  CsvTable t({"m", "max_ratio"});
  for (int m : {2, 3, 4}) {
    t.row(std::vector<double>{static_cast<double>(m), max_uniform_ratio(m)});
  }
  return t.str();
}

std::string reproduce_fig2(int m, int n_max) {
  if (m < 1) {
    throw ValidationError("--m must be at least 1");
  }
  if (n_max < 1) {
    throw ValidationError("--n-max must be at least 1");
  }
  CsvTable t({"n", "max_theta"});
  for (int n = 1; n <= n_max; ++n) {
    t.row(std::vector<double>{static_cast<double>(n), max_applicable_theta(m, n)});
  }
  return t.str();
}

std::string reproduce_fig3(std::vector<double> ns) {
  constexpr int kDegree = 2;
  std::vector<std::string> header{"theta"};
  for (double n : ns) {
    if (!(n >= 1.0) || std::isinf(n)) {
      throw ValidationError("--n values must be finite and at least 1");
    }
    header.push_back("n=" + format_csv_number(n));
  }
  header.emplace_back("n=inf");
  ns.push_back(kInf);

  CsvTable t(header);
  for (int k = 0; k <= 100; ++k) {
    const double theta = k / 100.0;
    const DemandStats stats = normal_stats(theta, theta, kDegree + 1);
    std::vector<double> cells{theta};
    for (double n : ns) {
      cells.push_back(gamma_normal(kDegree, stats, n).value);
    }
    t.row(cells);
  }
  return t.str();
}

int require_bound(const PoAReport& r, const std::string& name, std::ostream& err) {
  if (name.empty()) {
    return kSuccess;
  }
  const BoundCheck* b = r.find_bound(name);
  if (b == nullptr) {
    err << "error: bound \"" << name << "\" does not apply to this network's cost degree or demand family\n";
    return kBoundNotApplicable;
  }
  if (!b->report.applicable) {
    err << "error: bound \"" << name << "\" not applicable: " << b->report.violated_condition << "\n";
    return kBoundNotApplicable;
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, optima and price-of-anarchy bounds for congestion games with random demand"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string scenario_path;
  std::string out_path;
  auto scenario_command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", out_path, "Write output here instead of stdout");
    return sub;
  };

  CLI::App* validate = scenario_command("validate", "Check a scenario and summarize it");
  CLI::App* solve_ue_cmd = scenario_command("solve-ue", "Solve the user equilibrium");
  std::string warm_start_path;
  solve_ue_cmd->add_option("--warm-start", warm_start_path, "Strategy JSON (e.g. earlier solve-ue output)");
  CLI::App* solve_so_cmd = scenario_command("solve-so", "Solve the system optimum");
  CLI::App* poa_cmd = scenario_command("poa", "Empirical price of anarchy and every applicable bound");
  std::string bound_name;
  poa_cmd->add_option("--bound", bound_name, "Exit 4 unless this bound applies")
      ->check(CLI::IsMember({"affine", "polynomial_positive", "polynomial_normal"}));

  CLI::App* mc_cmd = scenario_command("mc", "Monte Carlo estimate at the equilibrium or optimum");
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string target = "total";
  std::string regime = "ue";
  std::string edge_id;
  int order = 1;
  std::string strategy_path;
  unsigned threads = 0;
  mc_cmd->add_option("--samples", samples, "Number of demand draws")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", seed, "Random seed");
  mc_cmd->add_option("--target", target, "total cost or a link flow moment")
      ->check(CLI::IsMember({"total", "moment"}));
  mc_cmd->add_option("--edge", edge_id, "Edge id for --target moment");
  mc_cmd->add_option("--order", order, "Moment order for --target moment")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--regime", regime, "Strategy to simulate when --strategy is absent")
      ->check(CLI::IsMember({"ue", "so"}));
  mc_cmd->add_option("--strategy", strategy_path, "Strategy JSON to simulate");
  mc_cmd->add_option("--threads", threads, "Worker threads (0: STO_WARDROP_THREADS or hardware)");

  CLI::App* reproduce = app.add_subcommand("reproduce", "Regenerate reference tables and curves");
  reproduce->require_subcommand(1);
  double theta = 0.0;
  double d = 1.0;
  int j = 2;
  int m = 2;
  int n_max = 10;
  std::vector<double> ns{1.0, 2.0, 5.0, 10.0};
  auto reproduce_command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = reproduce->add_subcommand(name, help);
    sub->add_option("--out", out_path, "Write output here instead of stdout");
    return sub;
  };
  CLI::App* ex1 = reproduce_command("example1", "Two-link affine network: closed form vs solver");
  ex1->add_option("--theta", theta, "Coefficient of variation")->required();
  ex1->add_option("--d", d, "Mean demand");
  CLI::App* ex2 = reproduce_command("example2", "Two-link monomial network: closed form vs solver");
  ex2->add_option("--j", j, "Degree of the variable link")->required();
  ex2->add_option("--theta", theta, "Coefficient of variation")->required();
  ex2->add_option("--d", d, "Mean demand");
  CLI::App* table1 = reproduce_command("table1", "Positive-demand variability thresholds, m = 2..4");
  CLI::App* table2 = reproduce_command("table2", "Largest b/a for U[a, b] demand, m = 2..4");
  CLI::App* fig2 = reproduce_command("fig2", "Largest applicable theta for normal demand against n");
  fig2->add_option("--m", m, "Cost degree");
  fig2->add_option("--n-max", n_max, "Largest n");
  CLI::App* fig3 = reproduce_command("fig3", "Normal-demand bound against theta for m = 2");
  fig3->add_option("--n", ns, "Commodity counts, comma separated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  const Emitter emit{out, out_path};
  try {
    if (reproduce->parsed()) {
      const SolverConfig config;
      if (ex1->parsed()) {
        emit(reproduce_two_link(1, theta, d, config));
      } else if (ex2->parsed()) {
        emit(reproduce_two_link(j, theta, d, config));
      } else if (table1->parsed()) {
        emit(reproduce_table1());
      } else if (table2->parsed()) {
        emit(reproduce_table2());
      } else if (fig2->parsed()) {
        emit(reproduce_fig2(m, n_max));
      } else if (fig3->parsed()) {
        emit(reproduce_fig3(ns));
      }
      return kSuccess;
    }

    const Scenario scenario = load_scenario(scenario_path);
    const Network& net = scenario.network;

    if (validate->parsed()) {
      json pairs = json::array();
      for (std::size_t i = 0; i < net.commodity_count(); ++i) {
        bool truncated = false;
        for (std::size_t t : net.truncated_commodities()) {
          truncated = truncated || t == i;
        }
        pairs.push_back({{"id", net.od_pairs()[i].id}, {"paths", net.paths(i).size()}, {"truncated", truncated}});
      }
      json bounds = json::array();
      for (const BoundReport& b : applicable_bounds(net)) {
        bounds.push_back(b.name);
      }
      emit(json{{"valid", true},
                {"nodes", net.node_count()},
                {"edges", net.edge_count()},
                {"max_degree", net.max_degree()},
                {"od_pairs", pairs},
                {"candidate_bounds", bounds}});
      return kSuccess;
    }

    if (solve_ue_cmd->parsed()) {
      std::optional<Strategy> warm;
      if (!warm_start_path.empty()) {
        warm = parse_strategy(read_json_file(warm_start_path), net);
      }
      const EquilibriumResult r = solve_ue(net, scenario.solver, warm);
      emit(to_json(net, r));
      if (!r.converged) {
        err << "error: equilibrium solver did not converge (gap " << r.gap.value << ")\n";
        return kNotConverged;
      }
      return kSuccess;
    }

    if (solve_so_cmd->parsed()) {
      const OptimumResult r = solve_so(net, scenario.solver);
      emit(to_json(net, r));
      if (!r.converged) {
        err << "error: optimum solver did not converge (projected gradient " << r.projected_gradient_norm << ")\n";
        return kNotConverged;
      }
      return kSuccess;
    }

    if (poa_cmd->parsed()) {
      const PoAReport r = compute_poa(net, scenario.solver);
      emit(to_json(net, r));
      const int bound_code = require_bound(r, bound_name, err);
      if (bound_code != kSuccess) {
        return bound_code;
      }
      if (!r.converged()) {
        err << "error: solver did not converge; the ratio is not certified\n";
        return kNotConverged;
      }
      return kSuccess;
    }

    if (mc_cmd->parsed()) {
      if (samples < 2) {
        throw ValidationError("--samples must be at least 2");
      }
      Strategy strategy;
      bool converged = true;
      std::string source = strategy_path.empty() ? regime : "file";
      if (!strategy_path.empty()) {
        strategy = parse_strategy(read_json_file(strategy_path), net);
      } else if (regime == "ue") {
        const EquilibriumResult r = solve_ue(net, scenario.solver);
        strategy = r.strategy;
        converged = r.converged;
      } else {
        const OptimumResult r = solve_so(net, scenario.solver);
        strategy = r.strategy;
        converged = r.converged;
      }
      McEstimate estimate;
      double analytic = 0.0;
      json doc;
      if (target == "total") {
        estimate = simulate_total_cost(strategy, net, samples, seed, threads);
        analytic = expected_total_cost(strategy, net);
      } else {
        if (edge_id.empty()) {
          throw ValidationError("--target moment needs --edge");
        }
        const auto edge = net.find_edge(edge_id);
        if (!edge) {
          throw ValidationError("unknown edge \"" + edge_id + "\"");
        }
        estimate = simulate_link_moment(*edge, order, strategy, net, samples, seed, threads);
        analytic = link_raw_moment(*edge, order, strategy, net);
        doc["edge"] = edge_id;
        doc["order"] = order;
      }
      doc.update(to_json(estimate));
      doc["target"] = target;
      doc["strategy_source"] = source;
      doc["analytic"] = analytic;
      doc["z_score"] = estimate.standard_error > 0.0 ? (estimate.estimate - analytic) / estimate.standard_error : 0.0;
      emit(doc);
      if (!converged) {
        err << "error: solver did not converge; simulated strategy is not an exact " << regime << "\n";
        return kNotConverged;
      }
      return kSuccess;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const MomentUnavailable& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DegenerateCost& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const NotApplicable& e) {
    err << "error: " << e.what() << "\n";
    return kBoundNotApplicable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace stowardrop::cli
