#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "../support/instances.hpp"
#include "doctest.h"
#include "stowardrop/costs.hpp"
#include "stowardrop/errors.hpp"
#include "stowardrop/network.hpp"

using namespace stowardrop;

namespace {

// r x c grid with edges both ways between neighbours.
Network grid(int rows, int cols, std::size_t max_paths = kDefaultMaxPaths) {
  NetworkBuilder b;
  b.set_max_paths(max_paths);
  auto name = [](int r, int c) { return std::to_string(r) + "," + std::to_string(c); };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) b.add_node(name(r, c));
  int e = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        b.add_edge("h" + std::to_string(e++), name(r, c), name(r, c + 1), PolynomialCost::affine(1, 0));
        b.add_edge("h" + std::to_string(e++), name(r, c + 1), name(r, c), PolynomialCost::affine(1, 0));
      }
      if (r + 1 < rows) {
        b.add_edge("v" + std::to_string(e++), name(r, c), name(r + 1, c), PolynomialCost::affine(1, 0));
        b.add_edge("v" + std::to_string(e++), name(r + 1, c), name(r, c), PolynomialCost::affine(1, 0));
      }
    }
  }
  b.add_od_pair("corner", name(0, 0), name(rows - 1, cols - 1), DemandDistribution::deterministic(1));
  return b.build();
}

// Independent oracle: count self-avoiding node walks on the undirected grid.
int count_grid_walks(int rows, int cols) {
  std::vector<bool> seen(static_cast<std::size_t>(rows * cols), false);
  std::function<int(int, int)> walk = [&](int r, int c) -> int {
    if (r == rows - 1 && c == cols - 1) return 1;
    seen[r * cols + c] = true;
    int total = 0;
    const int dr[] = {0, 0, 1, -1};
    const int dc[] = {1, -1, 0, 0};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (nr >= 0 && nr < rows && nc >= 0 && nc < cols && !seen[nr * cols + nc]) total += walk(nr, nc);
    }
    seen[r * cols + c] = false;
    return total;
  };
  return walk(0, 0);
}

bool replay(const Network& net, std::size_t i, const Path& p) {
  NodeIndex at = net.od_pairs()[i].origin;
  std::set<NodeIndex> visited{at};
  for (EdgeIndex e : p) {
    if (net.edges()[e].tail != at) return false;
    at = net.edges()[e].head;
    if (!visited.insert(at).second) return false;
  }
  return at == net.od_pairs()[i].destination;
}

}  // namespace

TEST_CASE("two-link network has upper then lower") {
  const Network net = testsupport::example1(0.5);
  REQUIRE(net.paths(0).size() == 2);
  CHECK(net.paths(0)[0] == Path{0});
  CHECK(net.paths(0)[1] == Path{1});
  const Incidence inc = build_incidence(net);
  CHECK(inc.commodities_on_edge == std::vector<int>{1, 1});
  CHECK(inc.max_commodities_per_edge == 1);
}

TEST_CASE("single edge has one path") {
  NetworkBuilder b;
  b.add_node("s");
  b.add_node("t");
  b.add_edge("e", "s", "t", PolynomialCost::affine(1, 0));
  b.add_od_pair("st", "s", "t", DemandDistribution::deterministic(1));
  CHECK(b.build().paths(0).size() == 1);
}

TEST_CASE("3x3 grid paths match a brute-force count") {
  const Network net = grid(3, 3);
  CHECK(count_grid_walks(3, 3) == 12);
  CHECK(net.paths(0).size() == 12);
  CHECK(net.truncated_commodities().empty());
  for (const auto& p : net.paths(0)) CHECK(replay(net, 0, p));
  CHECK(std::is_sorted(net.paths(0).begin(), net.paths(0).end()));
  CHECK(grid(3, 4).paths(0).size() == static_cast<std::size_t>(count_grid_walks(3, 4)));

  const Network capped = grid(3, 3, 5);
  CHECK(capped.paths(0).size() == 5);
  CHECK(capped.truncated_commodities() == std::vector<std::size_t>{0});
  const auto exact = enumerate_paths(net, 0, 12);
  CHECK_FALSE(exact.truncated);
}

TEST_CASE("builder validation") {
  NetworkBuilder b;
  b.add_node("a");
  b.add_node("b");
  b.add_node("c");
  b.add_edge("ab", "a", "b", PolynomialCost::affine(1, 0));
  b.add_edge("bc", "b", "c", PolynomialCost::affine(1, 0));
  CHECK_THROWS_AS(b.add_edge("zz", "a", "nowhere", PolynomialCost::affine(1, 0)), ValidationError);

  SUBCASE("duplicate node") {
    b.add_node("a");
    b.add_od_pair("x", "a", "c", DemandDistribution::deterministic(1));
    CHECK_THROWS_AS((void)b.build(), ValidationError);
  }
  SUBCASE("duplicate edge") {
    b.add_edge("ab", "a", "b", PolynomialCost::affine(1, 0));
    b.add_od_pair("x", "a", "c", DemandDistribution::deterministic(1));
    CHECK_THROWS_AS((void)b.build(), ValidationError);
  }
  SUBCASE("origin equals destination") {
    b.add_od_pair("x", "a", "a", DemandDistribution::deterministic(1));
    CHECK_THROWS_AS((void)b.build(), ValidationError);
  }
  SUBCASE("no O-D pairs") { CHECK_THROWS_AS((void)b.build(), ValidationError); }
  SUBCASE("unreachable") {
    b.add_od_pair("x", "c", "a", DemandDistribution::deterministic(1));
    CHECK_THROWS_AS((void)b.build(), NoPathExists);
  }
  SUBCASE("explicit path that skips a node") {
    b.add_od_pair("x", "a", "c", DemandDistribution::deterministic(1), std::vector<Path>{{1}});
    CHECK_THROWS_AS((void)b.build(), ValidationError);
  }
  SUBCASE("explicit path repeated") {
    b.add_od_pair("x", "a", "c", DemandDistribution::deterministic(1), std::vector<Path>{{0, 1}, {0, 1}});
    CHECK_THROWS_AS((void)b.build(), ValidationError);
  }
  SUBCASE("explicit path accepted") {
    b.add_od_pair("x", "a", "c", DemandDistribution::deterministic(1), std::vector<Path>{{0, 1}});
    CHECK(b.build().paths(0) == std::vector<Path>{{0, 1}});
  }
}

TEST_CASE("check_path reasons") {
  const Network net = testsupport::example1(0.0);
  CHECK(check_path(net.edges(), 0, 1, {0}).empty());
  CHECK_FALSE(check_path(net.edges(), 0, 1, {}).empty());
  CHECK_FALSE(check_path(net.edges(), 0, 1, {5}).empty());
  CHECK_FALSE(check_path(net.edges(), 0, 1, {0, 1}).empty());
}

TEST_CASE("incidence counts shared edges") {
  NetworkBuilder b;
  b.add_node("a");
  b.add_node("b");
  b.add_node("c");
  b.add_edge("ab", "a", "b", PolynomialCost::affine(1, 0));
  b.add_edge("bc", "b", "c", PolynomialCost::affine(1, 0));
  b.add_od_pair("1", "a", "c", DemandDistribution::deterministic(1));
  b.add_od_pair("2", "b", "c", DemandDistribution::deterministic(1));
  const Incidence inc = build_incidence(b.build());
  CHECK(inc.commodities_on_edge == std::vector<int>{1, 2});
  CHECK(inc.max_commodities_per_edge == 2);
}

TEST_CASE("incidence agrees with a recount on random instances") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const Network net = testsupport::random_instance(rng);
    const Incidence inc = build_incidence(net);
    CHECK(build_incidence(net).commodities_on_edge == inc.commodities_on_edge);
    int n = 0;
    for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
      int count = 0;
      for (std::size_t i = 0; i < net.commodity_count(); ++i) {
        bool uses = false;
        for (const auto& p : net.paths(i)) uses = uses || std::find(p.begin(), p.end(), e) != p.end();
        count += uses ? 1 : 0;
      }
      CHECK(inc.commodities_on_edge[e] == count);
      n = std::max(n, count);
    }
    CHECK(inc.max_commodities_per_edge == n);
    for (std::size_t i = 0; i < net.commodity_count(); ++i)
      for (const auto& p : net.paths(i)) CHECK(replay(net, i, p));
  }
}

TEST_CASE("monomial split") {
  NetworkBuilder b;
  b.add_node("o");
  b.add_node("t");
  b.add_edge("a", "o", "t", PolynomialCost({1.0, 1.0}));
  b.add_edge("q", "o", "t", PolynomialCost({0.0, 0.0, 2.0}));
  b.add_od_pair("od", "o", "t", DemandDistribution::normal(1.0, 0.3));
  const Network net = b.build();
  const Network split = split_to_monomials(net);
  REQUIRE(split.edge_count() == 5);
  CHECK(split.edges()[0].cost == PolynomialCost({1.0}));
  CHECK(split.edges()[1].cost == PolynomialCost({0.0, 1.0}));
  CHECK(split.edges()[2].cost == PolynomialCost({0.0}));
  CHECK(split.edges()[3].cost == PolynomialCost({0.0, 0.0}));
  CHECK(split.edges()[4].cost == PolynomialCost({0.0, 0.0, 2.0}));
  CHECK(split.paths(0).size() == 2);
  CHECK(split.paths(0)[0].size() == 2);
  CHECK(split.paths(0)[1].size() == 3);
}

TEST_CASE("monomial split preserves expected costs") {
  const Network ex1 = testsupport::example1(0.5);
  const Network ex1s = split_to_monomials(ex1);
  for (const auto& p : {std::vector<double>{0, 1}, std::vector<double>{0.5, 0.5}}) {
    const Strategy s{{p}};
    CHECK(expected_total_cost(s, ex1s) == doctest::Approx(expected_total_cost(s, ex1)).epsilon(1e-12));
  }
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const Network net = testsupport::random_instance(rng);
    const Network split = split_to_monomials(net);
    const CostModel a(net), b(split);
    for (int r = 0; r < 3; ++r) {
      const Strategy s = testsupport::random_point(net, rng);
      CHECK(b.expected_total_cost(s) == doctest::Approx(a.expected_total_cost(s)).epsilon(1e-12));
      const auto ca = a.expected_path_costs(a.evaluate(s));
      const auto cb = b.expected_path_costs(b.evaluate(s));
      for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t k = 0; k < ca[i].size(); ++k) CHECK(cb[i][k] == doctest::Approx(ca[i][k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaled copy") {
  const Network net = testsupport::example1(1.0);
  const Network big = net.with_scaled_costs(3.0);
  CHECK(big.edges()[0].cost(0.0) == doctest::Approx(3.0));
  CHECK(net.find_edge("lower") == EdgeIndex{1});
  CHECK(net.find_node("t") == NodeIndex{1});
  CHECK_FALSE(net.find_node("zz").has_value());
}
