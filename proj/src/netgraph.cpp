#include "acclink/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "acclink/csv.hpp"

namespace acclink::netgraph {

std::size_t ConversationGraph::add_node(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    out_.emplace_back();
  }
  return it->second;
}

void ConversationGraph::add_edge(const std::string& src, const std::string& dst, double weight) {
  const auto u = add_node(src);
  const auto v = add_node(dst);
  if (u == v) return;
  out_[u][v] += weight;
}

std::size_t ConversationGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& m : out_) n += m.size();
  return n;
}

std::optional<std::size_t> ConversationGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ConversationGraph::Edge> ConversationGraph::out_edges(std::size_t u) const {
  std::vector<Edge> edges;
  edges.reserve(out_[u].size());
  for (const auto& [v, w] : out_[u]) edges.push_back({v, w});
  return edges;
}

double ConversationGraph::out_weight(std::size_t u) const {
  double s = 0.0;
  for (const auto& [v, w] : out_[u]) s += w;
  return s;
}

double ConversationGraph::weight(std::size_t u, std::size_t v) const {
  auto it = out_[u].find(v);
  return it == out_[u].end() ? 0.0 : it->second;
}

ConversationGraph build_graph(const corpus::Corpus& corpus, const std::vector<std::string>& accounts) {
  ConversationGraph g;
  std::vector<std::string> sorted = accounts;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& a : sorted) g.add_node(a);
  for (const auto& a : sorted) {
    if (!corpus.has_author(a)) continue;
    for (const auto& p : corpus.posts_of(a)) {
      for (const auto& m : p.mentions) g.add_edge(a, m);
      if (p.reply_to) g.add_edge(a, *p.reply_to);
      if (p.retweet_of) g.add_edge(a, *p.retweet_of);
    }
  }
  return g;
}

namespace {

struct InEdge {
  std::size_t source;
  double weight;
};

std::vector<std::vector<InEdge>> in_edges(const ConversationGraph& g) {
  std::vector<std::vector<InEdge>> in(g.node_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    for (const auto& e : g.out_edges(u)) in[e.target].push_back({u, e.weight});
  }
  return in;
}

double l2_normalize(Scores& x) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : x) v /= norm;
  }
  return norm;
}

double l1_distance(const Scores& a, const Scores& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

void require_nodes(const ConversationGraph& g, const char* op) {
  if (g.node_count() == 0) throw data_error(fmt::format("{} needs a nonempty graph", op));
}

}  // namespace

Scores pagerank(const ConversationGraph& g, double damping, double tol, std::size_t max_iter) {
  require_nodes(g, "pagerank");
  const std::size_t n = g.node_count();
  const double nd = static_cast<double>(n);
  const auto in = in_edges(g);
  Scores out_w(n);
  for (std::size_t u = 0; u < n; ++u) out_w[u] = g.out_weight(u);

  Scores x(n, 1.0 / nd), next(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (out_w[u] == 0.0) dangling += x[u];
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (const auto& e : in[v]) s += x[e.source] * e.weight / out_w[e.source];
      next[v] = base + damping * s;
    }
    const double change = l1_distance(next, x);
    x.swap(next);
    if (change < tol) {
      double total = 0.0;
      for (double v : x) total += v;
      for (double& v : x) v /= total;
      return x;
    }
  }
  throw ConvergenceError(fmt::format("pagerank did not converge in {} iterations", max_iter), x);
}

HitsResult hits(const ConversationGraph& g, double tol, std::size_t max_iter) {
  require_nodes(g, "hits");
  const std::size_t n = g.node_count();
  const auto in = in_edges(g);
  HitsResult r;
  r.hub.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  r.authority.assign(n, 0.0);
  if (g.edge_count() == 0) {
    r.hub.assign(n, 0.0);
    r.degenerate = true;
    r.converged = true;
    return r;
  }
  Scores hub_next(n), auth_next(n);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (const auto& e : in[v]) s += e.weight * r.hub[e.source];
      auth_next[v] = s;
    }
    l2_normalize(auth_next);
    for (std::size_t u = 0; u < n; ++u) {
      double s = 0.0;
      for (const auto& e : g.out_edges(u)) s += e.weight * auth_next[e.target];
      hub_next[u] = s;
    }
    l2_normalize(hub_next);
    const double change = l1_distance(hub_next, r.hub) + l1_distance(auth_next, r.authority);
    r.hub.swap(hub_next);
    r.authority.swap(auth_next);
    r.iterations = iter;
    if (change < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

Scores eigenvector_centrality(const ConversationGraph& g, double tol, std::size_t max_iter) {
  require_nodes(g, "eigenvector_centrality");
  const std::size_t n = g.node_count();
  const auto in = in_edges(g);
  Scores x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (const auto& e : in[v]) s += e.weight * x[e.source];
      next[v] = s;
    }
    l2_normalize(next);
    const double change = l1_distance(next, x);
    x.swap(next);
    if (change < tol) return x;
  }
  throw ConvergenceError(
      fmt::format("eigenvector centrality did not converge in {} iterations", max_iter), x);
}

TriangleStats triangles_and_clustering(const ConversationGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& e : g.out_edges(u)) {
      adj[u].insert(e.target);
      adj[e.target].insert(u);
    }
  }
  TriangleStats t;
  t.triangles.assign(n, 0);
  t.clustering.assign(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const std::vector<std::size_t> nb(adj[u].begin(), adj[u].end());
    std::size_t count = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (adj[nb[i]].count(nb[j])) ++count;
      }
    }
    t.triangles[u] = count;
    const double deg = static_cast<double>(nb.size());
    if (nb.size() >= 2) t.clustering[u] = 2.0 * static_cast<double>(count) / (deg * (deg - 1.0));
  }
  return t;
}

NetworkAnalysis::NetworkAnalysis(const ConversationGraph& g, const NetworkOptions& options)
    : graph_(&g) {
  require_nodes(g, "network analysis");
  try {
    pagerank_ = pagerank(g, options.damping, options.tol, options.max_iter);
  } catch (const ConvergenceError& e) {
    if (!options.accept_last_iterate) throw;
    pagerank_ = e.last_iterate();
    flags_.push_back("pagerank_not_converged");
  }
  try {
    eigenvector_ = eigenvector_centrality(g, options.tol, options.max_iter);
  } catch (const ConvergenceError& e) {
    if (!options.accept_last_iterate) throw;
    eigenvector_ = e.last_iterate();
    flags_.push_back("eigenvector_not_converged");
  }
  auto h = hits(g, options.tol, options.max_iter);
  if (h.degenerate) flags_.push_back("hits_edgeless_graph");
  if (!h.converged) flags_.push_back("hits_not_converged");
  hub_ = std::move(h.hub);
  authority_ = std::move(h.authority);
  auto t = triangles_and_clustering(g);
  triangles_ = std::move(t.triangles);
  clustering_ = std::move(t.clustering);
}

textfeat::FeatureVector NetworkAnalysis::features(const std::string& account) const {
  const auto idx = graph_->index_of(account);
  if (!idx) throw data_error(fmt::format("account '{}' is not in the conversation graph", account));
  const auto i = *idx;
  return textfeat::FeatureVector{
      textfeat::Category::Network, textfeat::schema(textfeat::Category::Network),
      {authority_[i], hub_[i], static_cast<double>(triangles_[i]), eigenvector_[i], pagerank_[i],
       clustering_[i]}};
}

textfeat::FeatureVector network_features(const ConversationGraph& g, const std::string& account) {
  if (!g.index_of(account)) {
    throw data_error(fmt::format("account '{}' is not in the conversation graph", account));
  }
  return NetworkAnalysis(g).features(account);
}

void write_edge_list(const ConversationGraph& g, std::ostream& out, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "source,target,weight\n";
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    const auto edges = g.out_edges(u);
    for (const auto& e : edges) {
      out << csv::join({g.nodes()[u], g.nodes()[e.target], csv::format_double(e.weight)}) << '\n';
    }
  }
  // Nodes without any edge keep their place as rows with an empty target.
  const auto in_deg = in_edges(g);
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (g.out_edges(u).empty() && in_deg[u].empty()) out << csv::join({g.nodes()[u], "", "0"}) << '\n';
  }
}

ConversationGraph read_edge_list(std::istream& in, const std::string& source_name) {
  const auto table = csv::read_table(in, source_name);
  const auto is = table.column("source");
  const auto it = table.column("target");
  const auto iw = table.column("weight");
  ConversationGraph g;
  for (const auto& row : table.rows) {
    if (row[it].empty()) {
      g.add_node(row[is]);
      continue;
    }
    const double w = csv::parse_double(row[iw], source_name);
    if (!(w > 0.0)) throw data_error(fmt::format("{}: edge weight must be positive", source_name));
    g.add_edge(row[is], row[it], w);
  }
  return g;
}

}  // namespace acclink::netgraph
