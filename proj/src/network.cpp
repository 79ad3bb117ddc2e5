#include "stowardrop/network.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "stowardrop/errors.hpp"

namespace stowardrop {

int Network::max_degree() const {
  int m = 0;
  for (const auto& e : edges_) {
    m = std::max(m, e.cost.degree());
  }
  return m;
}

std::vector<DemandDistribution> Network::demands() const {
  std::vector<DemandDistribution> out;
  out.reserve(od_pairs_.size());
  for (const auto& od : od_pairs_) {
    out.push_back(od.demand);
  }
  return out;
}

std::optional<NodeIndex> Network::find_node(const std::string& id) const {
  for (NodeIndex v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v] == id) {
      return v;
    }
  }
  return std::nullopt;
}

std::optional<EdgeIndex> Network::find_edge(const std::string& id) const {
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    if (edges_[e].id == id) {
      return e;
    }
  }
  return std::nullopt;
}

Network Network::with_scaled_costs(double factor) const {
  Network copy = *this;
  for (auto& e : copy.edges_) {
    e.cost = e.cost.scaled(factor);
  }
  return copy;
}

NodeIndex NetworkBuilder::add_node(std::string id) {
  draft_.nodes_.push_back(std::move(id));
  return draft_.nodes_.size() - 1;
}

EdgeIndex NetworkBuilder::add_edge(std::string id, NodeIndex tail, NodeIndex head, PolynomialCost cost) {
  if (tail >= draft_.nodes_.size() || head >= draft_.nodes_.size()) {
    throw ValidationError("edge '" + id + "' references an unknown node");
  }
  draft_.edges_.push_back(Edge{std::move(id), tail, head, std::move(cost)});
  return draft_.edges_.size() - 1;
}

EdgeIndex NetworkBuilder::add_edge(std::string id, const std::string& tail, const std::string& head,
                                   PolynomialCost cost) {
  return add_edge(std::move(id), node_or_throw(tail), node_or_throw(head), std::move(cost));
}

std::size_t NetworkBuilder::add_od_pair(std::string id, NodeIndex origin, NodeIndex destination,
                                        DemandDistribution demand, std::optional<std::vector<Path>> paths) {
  if (origin >= draft_.nodes_.size() || destination >= draft_.nodes_.size()) {
    throw ValidationError("O-D pair '" + id + "' references an unknown node");
  }
  draft_.od_pairs_.push_back(OdPair{std::move(id), origin, destination, std::move(demand)});
  explicit_paths_.push_back(std::move(paths));
  return draft_.od_pairs_.size() - 1;
}

std::size_t NetworkBuilder::add_od_pair(std::string id, const std::string& origin, const std::string& destination,
                                        DemandDistribution demand, std::optional<std::vector<Path>> paths) {
  return add_od_pair(std::move(id), node_or_throw(origin), node_or_throw(destination), std::move(demand),
                     std::move(paths));
}

void NetworkBuilder::set_max_paths(std::size_t max_paths) {
  if (max_paths == 0) {
    throw ValidationError("max_paths must be positive");
  }
  max_paths_ = max_paths;
}

NodeIndex NetworkBuilder::node_or_throw(const std::string& id) const {
  if (auto v = draft_.find_node(id)) {
    return *v;
  }
  throw ValidationError("unknown node '" + id + "'");
}

Network NetworkBuilder::build() const {
  Network net = draft_;

  std::set<std::string> seen;
  for (const auto& node : net.nodes_) {
    if (!seen.insert(node).second) {
      throw ValidationError("duplicate node id '" + node + "'");
    }
  }
  seen.clear();
  for (const auto& edge : net.edges_) {
    if (!seen.insert(edge.id).second) {
      throw ValidationError("duplicate edge id '" + edge.id + "'");
    }
  }
  seen.clear();
  if (net.od_pairs_.empty()) {
    throw ValidationError("network has no O-D pairs");
  }

  net.paths_.clear();
  net.truncated_.clear();
  for (std::size_t i = 0; i < net.od_pairs_.size(); ++i) {
    const OdPair& od = net.od_pairs_[i];
    if (!seen.insert(od.id).second) {
      throw ValidationError("duplicate O-D pair id '" + od.id + "'");
    }
    if (od.origin == od.destination) {
      throw ValidationError("O-D pair '" + od.id + "' has origin equal to destination");
    }
    if (const auto& given = explicit_paths_[i]) {
      if (given->empty()) {
        throw ValidationError("O-D pair '" + od.id + "' has an empty path list");
      }
      std::set<Path> distinct;
      for (const Path& path : *given) {
        if (auto why = check_path(net.edges_, od.origin, od.destination, path); !why.empty()) {
          throw ValidationError("O-D pair '" + od.id + "': " + why);
        }
        if (!distinct.insert(path).second) {
          throw ValidationError("O-D pair '" + od.id + "' lists the same path twice");
        }
      }
      net.paths_.push_back(*given);
    } else {
      PathEnumeration found = enumerate_paths(net.edges_, net.nodes_.size(), od.origin, od.destination, max_paths_);
      if (found.paths.empty()) {
        throw NoPathExists("no path from '" + net.nodes_[od.origin] + "' to '" + net.nodes_[od.destination] +
                           "' for O-D pair '" + od.id + "'");
      }
      if (found.truncated) {
        net.truncated_.push_back(i);
      }
      net.paths_.push_back(std::move(found.paths));
    }
  }
  return net;
}

PathEnumeration enumerate_paths(const std::vector<Edge>& edges, std::size_t node_count, NodeIndex origin,
                                NodeIndex destination, std::size_t max_paths) {
  if (max_paths == 0) {
    throw ValidationError("max_paths must be positive");
  }
  std::vector<std::vector<EdgeIndex>> out_edges(node_count);
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    out_edges[edges[e].tail].push_back(e);  // ascending edge index
  }

  PathEnumeration result;
  std::vector<bool> on_stack(node_count, false);
  Path current;

  std::function<bool(NodeIndex)> dfs = [&](NodeIndex at) -> bool {
    if (at == destination) {
      if (result.paths.size() == max_paths) {
        result.truncated = true;
        return false;
      }
      result.paths.push_back(current);
      return true;
    }
    on_stack[at] = true;
    for (EdgeIndex e : out_edges[at]) {
      const NodeIndex next = edges[e].head;
      if (on_stack[next]) {
        continue;
      }
      current.push_back(e);
      const bool keep_going = dfs(next);
      current.pop_back();
      if (!keep_going) {
        on_stack[at] = false;
        return false;
      }
    }
    on_stack[at] = false;
    return true;
  };
  dfs(origin);
  return result;
}

PathEnumeration enumerate_paths(const Network& network, std::size_t commodity, std::size_t max_paths) {
  const OdPair& od = network.od_pairs().at(commodity);
  PathEnumeration found = enumerate_paths(network.edges(), network.node_count(), od.origin, od.destination, max_paths);
  if (found.paths.empty()) {
    throw NoPathExists("no path for O-D pair '" + od.id + "'");
  }
  return found;
}

std::string check_path(const std::vector<Edge>& edges, NodeIndex origin, NodeIndex destination, const Path& path) {
  if (path.empty()) {
    return "path has no edges";
  }
  std::unordered_set<EdgeIndex> used;
  NodeIndex at = origin;
  for (EdgeIndex e : path) {
    if (e >= edges.size()) {
      return "path references unknown edge index " + std::to_string(e);
    }
    if (!used.insert(e).second) {
      return "path uses edge '" + edges[e].id + "' twice";
    }
    if (edges[e].tail != at) {
      return "path is disconnected at edge '" + edges[e].id + "'";
    }
    at = edges[e].head;
  }
  if (at != destination) {
    return "path does not end at the destination";
  }
  return {};
}

Incidence build_incidence(const Network& network) {
  const std::size_t edge_count = network.edge_count();
  Incidence inc;
  inc.path_edge.resize(network.commodity_count());
  inc.commodity_edge.assign(network.commodity_count(), std::vector<bool>(edge_count, false));
  inc.commodities_on_edge.assign(edge_count, 0);
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    const auto& paths = network.paths(i);
    inc.path_edge[i].assign(paths.size(), std::vector<bool>(edge_count, false));
    for (std::size_t k = 0; k < paths.size(); ++k) {
      for (EdgeIndex e : paths[k]) {
        inc.path_edge[i][k][e] = true;
        inc.commodity_edge[i][e] = true;
      }
    }
    for (EdgeIndex e = 0; e < edge_count; ++e) {
      if (inc.commodity_edge[i][e]) {
        ++inc.commodities_on_edge[e];
      }
    }
  }
  for (int count : inc.commodities_on_edge) {
    inc.max_commodities_per_edge = std::max(inc.max_commodities_per_edge, count);
  }
  return inc;
}

Network split_to_monomials(const Network& network, std::optional<int> degree) {
  if (degree && *degree < network.max_degree()) {
    throw ValidationError("split degree is below the network's polynomial degree");
  }
  NetworkBuilder builder;
  for (const auto& node : network.nodes()) {
    builder.add_node(node);
  }
  // chains[e] lists the replacement links of original edge e in order.
  std::vector<std::vector<EdgeIndex>> chains(network.edge_count());
  for (EdgeIndex e = 0; e < network.edge_count(); ++e) {
    const Edge& edge = network.edges()[e];
    const int links = (degree ? *degree : edge.cost.degree()) + 1;
    NodeIndex from = edge.tail;
    for (int j = 0; j < links; ++j) {
      NodeIndex to = edge.head;
      if (j + 1 < links) {
        to = builder.add_node(edge.id + "~" + std::to_string(j + 1));
      }
      chains[e].push_back(builder.add_edge(edge.id + "^" + std::to_string(j), from, to,
                                           PolynomialCost::monomial(j, edge.cost.coefficient(j))));
      from = to;
    }
  }
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    const OdPair& od = network.od_pairs()[i];
    std::vector<Path> rewritten;
    for (const Path& path : network.paths(i)) {
      Path expanded;
      for (EdgeIndex e : path) {
        expanded.insert(expanded.end(), chains[e].begin(), chains[e].end());
      }
      rewritten.push_back(std::move(expanded));
    }
    builder.add_od_pair(od.id, od.origin, od.destination, od.demand, std::move(rewritten));
  }
  return builder.build();
}

}  // namespace stowardrop
