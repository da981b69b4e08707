#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "acclink/error.hpp"
#include "acclink/netgraph.hpp"
#include "oracles.hpp"

using namespace acclink;
using namespace acclink::netgraph;

namespace {

ConversationGraph graph(std::initializer_list<std::tuple<const char*, const char*, double>> edges,
                        std::initializer_list<const char*> nodes = {}) {
  ConversationGraph g;
  for (auto n : nodes) g.add_node(n);
  for (auto [s, t, w] : edges) g.add_edge(s, t, w);
  return g;
}

oracle::DenseGraph dense(const ConversationGraph& g) {
  oracle::DenseGraph d{g.node_count(), oracle::Matrix(g.node_count(), std::vector<double>(g.node_count(), 0.0))};
  for (std::size_t u = 0; u < g.node_count(); ++u)
    for (const auto& e : g.out_edges(u)) d.w[u][e.target] = e.weight;
  return d;
}

double idx(const ConversationGraph& g, const Scores& s, const char* id) { return s[*g.index_of(id)]; }

}  // namespace

TEST_CASE("build_graph aggregates interactions") {
  using corpus::make_post;
  std::vector<corpus::Post> posts = {
      make_post("1", "u", 1, "hi @v"),
      make_post("2", "u", 2, "again @v"),
      make_post("3", "v", 3, "re", std::string("u")),
      make_post("4", "u", 4, "RT", std::nullopt, std::string("u")),
      make_post("5", "w", 5, "RT", std::nullopt, std::string("v")),
      make_post("6", "x", 6, "alone"),
  };
  const auto c = corpus::Corpus::from_posts(posts);
  const auto g = build_graph(c, {"u", "v", "w", "x"});
  const auto u = *g.index_of("u"), v = *g.index_of("v"), w = *g.index_of("w");
  CHECK(g.weight(u, v) == 2.0);
  CHECK(g.weight(v, u) == 1.0);
  CHECK(g.weight(u, u) == 0.0);
  CHECK(g.weight(w, v) == 1.0);
  CHECK(g.out_weight(*g.index_of("x")) == 0.0);

  const auto quiet = corpus::Corpus::from_posts({make_post("1", "a", 1, "x"), make_post("2", "b", 2, "y")});
  const auto e = build_graph(quiet, {"a", "b"});
  CHECK(e.node_count() == 2);
  CHECK(e.edge_count() == 0);
}

TEST_CASE("pagerank") {
  const auto mutual = graph({{"a", "b", 1}, {"b", "a", 1}});
  const auto pr = pagerank(mutual);
  CHECK(pr[0] == doctest::Approx(0.5));
  CHECK(pr[1] == doctest::Approx(0.5));
  CHECK(pagerank(graph({}, {"solo"}))[0] == doctest::Approx(1.0));

  const auto chain = graph({{"a", "b", 1}, {"b", "c", 1}});
  const auto want = oracle::pagerank(dense(chain));
  const auto got = pagerank(chain);
  for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));
  CHECK(std::accumulate(got.begin(), got.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hits") {
  const auto one = graph({{"a", "b", 1}});
  const auto h = hits(one);
  CHECK(idx(one, h.authority, "b") == doctest::Approx(1.0));
  CHECK(idx(one, h.authority, "a") == doctest::Approx(0.0));
  CHECK(idx(one, h.hub, "a") == doctest::Approx(1.0));
  CHECK(idx(one, h.hub, "b") == doctest::Approx(0.0));

  const auto mutual = hits(graph({{"a", "b", 2}, {"b", "a", 2}}));
  CHECK(mutual.hub[0] == doctest::Approx(mutual.authority[0]));
  CHECK(mutual.hub[0] == doctest::Approx(mutual.hub[1]));

  const auto edgeless = hits(graph({}, {"a", "b"}));
  CHECK(edgeless.degenerate);
  CHECK(edgeless.hub == Scores{0.0, 0.0});

  // Fixed point: one more update step leaves the vectors unchanged.
  std::mt19937_64 rng(17);
  const auto d = oracle::random_graph(rng, 10, 0.3, true);
  ConversationGraph g;
  for (std::size_t i = 0; i < d.n; ++i) g.add_node(std::to_string(i));
  for (std::size_t u = 0; u < d.n; ++u)
    for (std::size_t v = 0; v < d.n; ++v)
      if (d.w[u][v] > 0) g.add_edge(std::to_string(u), std::to_string(v), d.w[u][v]);
  const auto r = hits(g);
  std::vector<double> auth(d.n, 0.0), hub(d.n, 0.0);
  for (std::size_t v = 0; v < d.n; ++v)
    for (std::size_t u = 0; u < d.n; ++u) auth[v] += d.w[u][v] * r.hub[u];
  oracle::l2_normalize(auth);
  for (std::size_t u = 0; u < d.n; ++u)
    for (std::size_t v = 0; v < d.n; ++v) hub[u] += d.w[u][v] * auth[v];
  oracle::l2_normalize(hub);
  for (std::size_t i = 0; i < d.n; ++i) {
    CHECK(auth[i] == doctest::Approx(r.authority[i]).epsilon(1e-6));
    CHECK(hub[i] == doctest::Approx(r.hub[i]).epsilon(1e-6));
  }
}

TEST_CASE("eigenvector centrality") {
  const auto k3 = graph({{"a", "b", 1}, {"b", "a", 1}, {"b", "c", 1}, {"c", "b", 1}, {"a", "c", 1}, {"c", "a", 1}});
  const auto e = eigenvector_centrality(k3);
  CHECK(e[0] == doctest::Approx(e[1]));
  CHECK(e[1] == doctest::Approx(e[2]));
  CHECK(eigenvector_centrality(graph({}, {"solo"}))[0] == doctest::Approx(1.0));

  // A directed star only drifts towards the centre, so compare iterates after
  // the same number of steps.
  const auto star = graph({{"l1", "c", 1}, {"l2", "c", 1}, {"l3", "c", 1}, {"l4", "c", 1}});
  Scores got;
  try {
    eigenvector_centrality(star, 1e-300, 1000);
    FAIL("a directed star converged");
  } catch (const ConvergenceError& e) {
    got = e.last_iterate();
  }
  const auto want = oracle::eigenvector(dense(star), 1000);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::fabs(got[i] - want[i]) <= 1e-6);
  for (const char* leaf : {"l1", "l2", "l3", "l4"}) CHECK(idx(star, got, "c") > 100 * idx(star, got, leaf));
}

TEST_CASE("triangles and clustering") {
  const auto tri = triangles_and_clustering(graph({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}}));
  CHECK(tri.triangles == std::vector<std::size_t>{1, 1, 1});
  CHECK(tri.clustering == Scores{1.0, 1.0, 1.0});
  const auto path = graph({{"a", "b", 1}, {"b", "c", 1}});
  const auto p = triangles_and_clustering(path);
  CHECK(p.triangles == std::vector<std::size_t>{0, 0, 0});
  CHECK(idx(path, p.clustering, "b") == 0.0);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto d = oracle::random_graph(rng, 30, 0.2, false);
    ConversationGraph g;
    for (std::size_t k = 0; k < d.n; ++k) g.add_node(std::to_string(k));
    for (std::size_t u = 0; u < d.n; ++u)
      for (std::size_t v = 0; v < d.n; ++v)
        if (d.w[u][v] > 0) g.add_edge(std::to_string(u), std::to_string(v), d.w[u][v]);
    CHECK(triangles_and_clustering(g).triangles == oracle::triangles(d));
  }
}

TEST_CASE("network features") {
  const auto g = graph({{"a", "b", 1}, {"b", "a", 1}}, {"lonely"});
  const auto f = network_features(g, "lonely");
  CHECK(f.names == textfeat::schema(textfeat::Category::Network));
  CHECK(f.at("authority") == 0.0);
  CHECK(f.at("hub") == 0.0);
  CHECK(f.at("triangles") == 0.0);
  CHECK(f.at("clustering") == 0.0);
  CHECK(f.at("pagerank") == doctest::Approx(pagerank(g)[*g.index_of("lonely")]));
  CHECK(f.at("pagerank") > 0.0);

  const auto a = network_features(g, "a");
  CHECK(a.at("eigenvector") == doctest::Approx(eigenvector_centrality(g)[*g.index_of("a")]));
  CHECK(a.at("hub") == doctest::Approx(hits(g).hub[*g.index_of("a")]));
  CHECK_THROWS_AS(network_features(g, "ghost"), Error);
}

TEST_CASE("scaling edge weights leaves scores unchanged") {
  const auto g1 = graph({{"a", "b", 1}, {"b", "c", 2}, {"c", "a", 1}, {"a", "c", 3}});
  const auto g2 = graph({{"a", "b", 5}, {"b", "c", 10}, {"c", "a", 5}, {"a", "c", 15}});
  const auto p1 = pagerank(g1), p2 = pagerank(g2);
  const auto h1 = hits(g1), h2 = hits(g2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p1[i] == doctest::Approx(p2[i]));
    CHECK(h1.hub[i] == doctest::Approx(h2.hub[i]));
    CHECK(h1.authority[i] == doctest::Approx(h2.authority[i]));
  }
}

TEST_CASE("analysis flags and accept_last_iterate") {
  const auto star = graph({{"l1", "c", 1}, {"l2", "c", 1}, {"l3", "c", 1}});
  NetworkOptions strict;
  strict.tol = 1e-14;
  strict.max_iter = 5;
  CHECK_THROWS_AS(NetworkAnalysis(star, strict), ConvergenceError);
  strict.accept_last_iterate = true;
  const NetworkAnalysis lenient(star, strict);
  CHECK_FALSE(lenient.flags().empty());
  CHECK(lenient.features("c").size() == 6);
}

TEST_CASE("edge list round trip") {
  const auto g = graph({{"a", "b", 2}, {"b", "c", 1}}, {"iso"});
  std::ostringstream out;
  write_edge_list(g, out);
  std::istringstream in(out.str());
  const auto back = read_edge_list(in, "mem");
  CHECK(back.node_count() == g.node_count());
  CHECK(back.weight(*back.index_of("a"), *back.index_of("b")) == 2.0);
  CHECK(back.index_of("iso").has_value());
  std::istringstream bad("source,target,weight\na,b,-1\n");
  CHECK_THROWS_AS(read_edge_list(bad, "mem"), Error);
}
