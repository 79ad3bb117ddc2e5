#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <set>
#include <sstream>

#include "stowardrop/cli.hpp"
#include "stowardrop/errors.hpp"

namespace stowardrop::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) {
      known = known || key == k;
    }
    if (!known) {
      fail(where, "unknown field \"" + key + "\"");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(where, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) {
    fail(where, "expected a string");
  }
  auto s = v.get<std::string>();
  if (s.empty()) {
    fail(where, "expected a non-empty string");
  }
  return s;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) {
    fail(where, "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    fail(where, "expected a finite number");
  }
  return x;
}

std::int64_t as_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    fail(where, "expected an integer");
  }
  return v.get<std::int64_t>();
}

std::vector<double> as_numbers(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    fail(where, "expected a non-empty array of numbers");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(as_number(v[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

DemandDistribution parse_demand(const json& v, const std::string& where) {
  if (!v.is_object()) {
    fail(where, "expected an object");
  }
  const std::string type = as_string(require(v, where, "type"), where + ".type");
  try {
    if (type == "deterministic") {
      allow_keys(v, where, {"type", "value"});
      return DemandDistribution::deterministic(as_number(require(v, where, "value"), where + ".value"));
    }
    if (type == "normal") {
      allow_keys(v, where, {"type", "mean", "stddev"});
      return DemandDistribution::normal(as_number(require(v, where, "mean"), where + ".mean"),
                                        as_number(require(v, where, "stddev"), where + ".stddev"));
    }
    if (type == "uniform") {
      allow_keys(v, where, {"type", "lower", "upper"});
      return DemandDistribution::uniform(as_number(require(v, where, "lower"), where + ".lower"),
                                         as_number(require(v, where, "upper"), where + ".upper"));
    }
    if (type == "moments") {
      allow_keys(v, where, {"type", "raw_moments"});
      return DemandDistribution::moment_table(
          as_numbers(require(v, where, "raw_moments"), where + ".raw_moments"));
    }
  } catch (const ValidationError& e) {
    if (std::string(e.what()).starts_with(where)) {
      throw;
    }
    fail(where, e.what());
  }
  fail(where + ".type", "unknown demand type \"" + type + "\"");
}

SolverConfig parse_solver(const json& v, const std::string& where) {
  if (!v.is_object()) {
    fail(where, "expected an object");
  }
  allow_keys(v, where,
             {"max_iterations", "relative_gap_tolerance", "so_gradient_tolerance", "restarts", "step_rule", "seed"});
  SolverConfig c;
  if (v.contains("max_iterations")) {
    c.max_iterations = static_cast<int>(as_integer(v["max_iterations"], where + ".max_iterations"));
  }
  if (v.contains("relative_gap_tolerance")) {
    c.relative_gap_tolerance = as_number(v["relative_gap_tolerance"], where + ".relative_gap_tolerance");
  }
  if (v.contains("so_gradient_tolerance")) {
    c.so_gradient_tolerance = as_number(v["so_gradient_tolerance"], where + ".so_gradient_tolerance");
  }
  if (v.contains("restarts")) {
    c.restarts = static_cast<int>(as_integer(v["restarts"], where + ".restarts"));
  }
  if (v.contains("step_rule")) {
    c.step_rule = parse_step_rule(as_string(v["step_rule"], where + ".step_rule"));
  }
  if (v.contains("seed")) {
    const auto s = as_integer(v["seed"], where + ".seed");
    if (s < 0) {
      fail(where + ".seed", "must be nonnegative");
    }
    c.seed = static_cast<std::uint64_t>(s);
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
  return c;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) {
    fail("scenario", "expected a JSON object");
  }
  allow_keys(doc, "scenario", {"version", "nodes", "edges", "od_pairs", "solver", "max_paths", "description"});
  const auto version = as_integer(require(doc, "scenario", "version"), "version");
  if (version != kScenarioVersion) {
    fail("version", "unsupported scenario version " + std::to_string(version));
  }

  NetworkBuilder builder;
  const json& nodes = require(doc, "scenario", "nodes");
  if (!nodes.is_array() || nodes.empty()) {
    fail("nodes", "expected a non-empty array");
  }
  std::set<std::string> node_ids;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string where = "nodes[" + std::to_string(k) + "]";
    auto id = as_string(nodes[k], where);
    if (!node_ids.insert(id).second) {
      fail(where, "duplicate node id \"" + id + "\"");
    }
    builder.add_node(std::move(id));
  }

  const json& edges = require(doc, "scenario", "edges");
  if (!edges.is_array() || edges.empty()) {
    fail("edges", "expected a non-empty array");
  }
  std::map<std::string, EdgeIndex> edge_ids;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    const json& e = edges[k];
    if (!e.is_object()) {
      fail(where, "expected an object");
    }
    allow_keys(e, where, {"id", "from", "to", "cost"});
    auto id = as_string(require(e, where, "id"), where + ".id");
    const auto from = as_string(require(e, where, "from"), where + ".from");
    const auto to = as_string(require(e, where, "to"), where + ".to");
    if (!node_ids.contains(from)) {
      fail(where + ".from", "unknown node \"" + from + "\"");
    }
    if (!node_ids.contains(to)) {
      fail(where + ".to", "unknown node \"" + to + "\"");
    }
    if (edge_ids.contains(id)) {
      fail(where, "duplicate edge id \"" + id + "\"");
    }
    PolynomialCost cost;
    try {
      cost = PolynomialCost(as_numbers(require(e, where, "cost"), where + ".cost"));
    } catch (const ValidationError& err) {
      if (std::string(err.what()).starts_with(where)) {
        throw;
      }
      fail(where + ".cost", err.what());
    }
    edge_ids[id] = builder.add_edge(id, from, to, std::move(cost));
  }

  const json& pairs = require(doc, "scenario", "od_pairs");
  if (!pairs.is_array() || pairs.empty()) {
    fail("od_pairs", "expected a non-empty array");
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string where = "od_pairs[" + std::to_string(k) + "]";
    const json& od = pairs[k];
    if (!od.is_object()) {
      fail(where, "expected an object");
    }
    allow_keys(od, where, {"id", "origin", "destination", "demand", "paths"});
    auto id = as_string(require(od, where, "id"), where + ".id");
    const auto origin = as_string(require(od, where, "origin"), where + ".origin");
    const auto destination = as_string(require(od, where, "destination"), where + ".destination");
    for (const auto& [field, node] : {std::pair{".origin", origin}, std::pair{".destination", destination}}) {
      if (!node_ids.contains(node)) {
        fail(where + field, "unknown node \"" + node + "\"");
      }
    }
    auto demand = parse_demand(require(od, where, "demand"), where + ".demand");
    std::optional<std::vector<Path>> paths;
    if (od.contains("paths")) {
      const json& list = od["paths"];
      if (!list.is_array() || list.empty()) {
        fail(where + ".paths", "expected a non-empty array of edge-id arrays");
      }
      paths.emplace();
      for (std::size_t q = 0; q < list.size(); ++q) {
        const std::string pw = where + ".paths[" + std::to_string(q) + "]";
        if (!list[q].is_array() || list[q].empty()) {
          fail(pw, "expected a non-empty array of edge ids");
        }
        Path path;
        for (std::size_t s = 0; s < list[q].size(); ++s) {
          const auto eid = as_string(list[q][s], pw + "[" + std::to_string(s) + "]");
          const auto it = edge_ids.find(eid);
          if (it == edge_ids.end()) {
            fail(pw, "unknown edge \"" + eid + "\"");
          }
          path.push_back(it->second);
        }
        paths->push_back(std::move(path));
      }
    }
    builder.add_od_pair(std::move(id), origin, destination, std::move(demand), std::move(paths));
  }

  if (doc.contains("max_paths")) {
    const auto mp = as_integer(doc["max_paths"], "max_paths");
    if (mp < 1) {
      fail("max_paths", "must be at least 1");
    }
    builder.set_max_paths(static_cast<std::size_t>(mp));
  }

  Scenario s{.network = {}, .solver = {}};
  if (doc.contains("solver")) {
    s.solver = parse_solver(doc["solver"], "solver");
  }
  try {
    s.network = builder.build();
  } catch (const NoPathExists& e) {
    throw ValidationError(e.what());
  }
  return s;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string reason = e.what();
    const auto at = reason.find(": ", reason.find("parse error"));
    reason = at == std::string::npos ? std::string() : "; " + reason.substr(at + 2);
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed JSON at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + reason);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

Scenario load_scenario(const std::string& path) {
  const json doc = read_json_file(path);
  try {
    return parse_scenario(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Strategy parse_strategy(const json& doc, const Network& network) {
  const json* shares = &doc;
  if (doc.is_object()) {
    shares = &require(doc, "strategy document", "strategy");
    if (doc.contains("paths")) {
      const json expected = to_json(network, Strategy::uniform(network))["paths"];
      if (doc["paths"] != expected) {
        fail("strategy document", "path sets do not match the scenario");
      }
    }
  }
  if (!shares->is_array() || shares->size() != network.commodity_count()) {
    fail("strategy", "expected one share array per O-D pair (" + std::to_string(network.commodity_count()) + ")");
  }
  Strategy s;
  for (std::size_t i = 0; i < shares->size(); ++i) {
    const std::string where = "strategy[" + std::to_string(i) + "]";
    s.p.push_back(as_numbers((*shares)[i], where));
  }
  validate_strategy(network, s, 1e-6);
  return s;
}

json to_json(const Network& network, const Strategy& strategy) {
  json paths = json::array();
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    json list = json::array();
    for (const Path& p : network.paths(i)) {
      json ids = json::array();
      for (EdgeIndex e : p) {
        ids.push_back(network.edges()[e].id);
      }
      list.push_back(std::move(ids));
    }
    paths.push_back(std::move(list));
  }
  json od_ids = json::array();
  for (const auto& od : network.od_pairs()) {
    od_ids.push_back(od.id);
  }
  return {{"od_pairs", od_ids}, {"paths", paths}, {"strategy", strategy.p}};
}

json to_json(const Network& network, const EquilibriumResult& r) {
  json j = to_json(network, r.strategy);
  j["kind"] = "user_equilibrium";
  j["gap"] = r.gap.value;
  j["gap_is_absolute"] = r.gap.absolute;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["step_rule"] = to_string(r.step_rule);
  j["min_path_cost"] = r.min_path_cost;
  j["total_cost"] = r.total_cost;
  j["diagnostics"] = {{"starts", r.diagnostics.starts},
                      {"converged_starts", r.diagnostics.converged_starts},
                      {"min_total_cost", r.diagnostics.min_total_cost},
                      {"max_total_cost", r.diagnostics.max_total_cost},
                      {"dispersion", r.diagnostics.dispersion}};
  return j;
}

json to_json(const Network& network, const OptimumResult& r) {
  json j = to_json(network, r.strategy);
  j["kind"] = "system_optimum";
  j["total_cost"] = r.total_cost;
  j["projected_gradient_norm"] = r.projected_gradient_norm;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["restarts_used"] = r.restarts_used;
  j["best_start"] = r.best_start;
  j["best_of_restarts"] = r.best_of_restarts;
  j["local_optimum_risk"] = r.local_optimum_risk;
  return j;
}

json to_json(const BoundReport& r) {
  json theta_m = json::array();
  for (double t : r.parameters.theta_bar_m) {
    theta_m.push_back(finite_or_null(t));
  }
  return {{"name", r.name},
          {"applicable", r.applicable},
          {"value", finite_or_null(r.value)},
          {"violated_condition", r.violated_condition},
          {"parameters",
           {{"m", r.parameters.m},
            {"n", finite_or_null(r.parameters.n)},
            {"theta_bar", r.parameters.theta_bar},
            {"theta_under", r.parameters.theta_under},
            {"theta_bar_m", theta_m}}}};
}

json to_json(const Network& network, const PoAReport& r) {
  json bounds = json::array();
  bool tight = false;
  json affine = nullptr;
  for (const BoundCheck& b : r.bounds) {
    json j = to_json(b.report);
    j["holds"] = b.holds;
    j["margin"] = finite_or_null(b.margin);
    j["tight"] = b.tight;
    bounds.push_back(std::move(j));
    tight = tight || (b.report.applicable && b.tight);
    if (b.report.name == "affine" && b.report.applicable) {
      affine = b.report.value;
    }
  }
  return {{"poa", r.poa},
          {"ue_total_cost", r.ue_total_cost},
          {"so_total_cost", r.so_total_cost},
          {"affine_bound", affine},
          {"tight", tight},
          {"converged", r.converged()},
          {"m", r.m},
          {"n", r.n},
          {"theta_bar", r.stats.theta_bar},
          {"theta_under", r.stats.theta_under},
          {"bounds", bounds},
          {"ue", to_json(network, r.ue)},
          {"so", to_json(network, r.so)}};
}

json to_json(const McEstimate& e) {
  return {{"estimate", e.estimate}, {"standard_error", e.standard_error}, {"samples", e.samples}, {"seed", e.seed}};
}

std::string format_csv_number(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << x;
  return os.str();
}

}  // namespace stowardrop::cli
