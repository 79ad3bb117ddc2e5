#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stowardrop/demand.hpp"
#include "stowardrop/polynomial.hpp"

namespace stowardrop {

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;
using Path = std::vector<EdgeIndex>;

struct Edge {
  std::string id;
  NodeIndex tail;
  NodeIndex head;
  PolynomialCost cost;
};

struct OdPair {
  std::string id;
  NodeIndex origin;
  NodeIndex destination;
  DemandDistribution demand;
};

inline constexpr std::size_t kDefaultMaxPaths = 1000;

struct PathEnumeration {
  std::vector<Path> paths;
  bool truncated = false;
};

/// Directed multigraph with O-D pairs and a fixed, finite path set per pair.
///
/// Built through NetworkBuilder and immutable afterwards.
class Network {
 public:
  [[nodiscard]] const std::vector<std::string>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<OdPair>& od_pairs() const { return od_pairs_; }
  [[nodiscard]] const std::vector<std::vector<Path>>& paths() const { return paths_; }
  [[nodiscard]] const std::vector<Path>& paths(std::size_t commodity) const { return paths_[commodity]; }

  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::size_t commodity_count() const { return od_pairs_.size(); }

  // O-D pairs whose path enumeration hit max_paths.
  [[nodiscard]] const std::vector<std::size_t>& truncated_commodities() const { return truncated_; }

  [[nodiscard]] int max_degree() const;
  [[nodiscard]] std::vector<DemandDistribution> demands() const;

  [[nodiscard]] std::optional<NodeIndex> find_node(const std::string& id) const;
  [[nodiscard]] std::optional<EdgeIndex> find_edge(const std::string& id) const;

  // Copy with every cost multiplied by factor.
  [[nodiscard]] Network with_scaled_costs(double factor) const;

 private:
  friend class NetworkBuilder;

  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<OdPair> od_pairs_;
  std::vector<std::vector<Path>> paths_;
  std::vector<std::size_t> truncated_;
};

class NetworkBuilder {
 public:
  NodeIndex add_node(std::string id);
  EdgeIndex add_edge(std::string id, NodeIndex tail, NodeIndex head, PolynomialCost cost);
  EdgeIndex add_edge(std::string id, const std::string& tail, const std::string& head, PolynomialCost cost);

  // Without explicit paths, build() enumerates all simple paths (up to max_paths).
  std::size_t add_od_pair(std::string id, NodeIndex origin, NodeIndex destination, DemandDistribution demand,
                          std::optional<std::vector<Path>> paths = std::nullopt);
  std::size_t add_od_pair(std::string id, const std::string& origin, const std::string& destination,
                          DemandDistribution demand, std::optional<std::vector<Path>> paths = std::nullopt);

  void set_max_paths(std::size_t max_paths);

  // Validates every invariant; throws ValidationError or NoPathExists.
  [[nodiscard]] Network build() const;

 private:
  [[nodiscard]] NodeIndex node_or_throw(const std::string& id) const;

  Network draft_;
  std::vector<std::optional<std::vector<Path>>> explicit_paths_;
  std::size_t max_paths_ = kDefaultMaxPaths;
};

/// All simple directed paths from origin to destination of one O-D pair,
/// in lexicographic order of edge indices, truncated at max_paths.
[[nodiscard]] PathEnumeration enumerate_paths(const Network& network, std::size_t commodity,
                                              std::size_t max_paths = kDefaultMaxPaths);
[[nodiscard]] PathEnumeration enumerate_paths(const std::vector<Edge>& edges, std::size_t node_count,
                                              NodeIndex origin, NodeIndex destination,
                                              std::size_t max_paths = kDefaultMaxPaths);

// Empty string when the path is a valid route for the commodity, else the reason.
[[nodiscard]] std::string check_path(const std::vector<Edge>& edges, NodeIndex origin, NodeIndex destination,
                                     const Path& path);

struct Incidence {
  // [i][k][e]: edge e lies on path k of commodity i
  std::vector<std::vector<std::vector<bool>>> path_edge;
  // [i][e]: some path of commodity i uses e
  std::vector<std::vector<bool>> commodity_edge;
  // [e]: number of commodities using e
  std::vector<int> commodities_on_edge;
  // max_e commodities_on_edge[e]
  int max_commodities_per_edge = 0;
};

[[nodiscard]] Incidence build_incidence(const Network& network);

/// Replace each edge by a serial chain of single-term links b_j x^j,
/// j = 0..degree, keeping zero-coefficient links. With `degree` unset each
/// edge uses its own polynomial degree.
[[nodiscard]] Network split_to_monomials(const Network& network, std::optional<int> degree = std::nullopt);

}  // namespace stowardrop
