#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "acclink/corpus.hpp"
#include "acclink/error.hpp"
#include "acclink/textfeat.hpp"

namespace acclink::netgraph {

/// Directed weighted account graph. Edge u->v accumulates one unit per mention
/// of v by u, reply from u to v and retweet by u of v. Self-loops are dropped.
class ConversationGraph {
 public:
  struct Edge {
    std::size_t target;
    double weight;
  };

  std::size_t add_node(const std::string& id);
  /// Adds `weight` to edge src->dst, creating both nodes. Ignores self-loops.
  void add_edge(const std::string& src, const std::string& dst, double weight = 1.0);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const;
  const std::vector<std::string>& nodes() const { return ids_; }
  std::optional<std::size_t> index_of(const std::string& id) const;

  /// Out-edges of node `u`, ordered by target index.
  std::vector<Edge> out_edges(std::size_t u) const;
  double out_weight(std::size_t u) const;
  double weight(std::size_t u, std::size_t v) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::map<std::size_t, double>> out_;
};

using Scores = std::vector<double>;  // indexed like ConversationGraph::nodes()

/// Raised when an iterative centrality does not settle within max_iter; carries
/// the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Scores last)
      : Error(ErrorKind::Data, what), last_iterate_(std::move(last)) {}
  const Scores& last_iterate() const { return last_iterate_; }

 private:
  Scores last_iterate_;
};

/// Accounts are added first (sorted), so isolated accounts are still nodes.
/// Interactions toward accounts outside the list create target nodes.
ConversationGraph build_graph(const corpus::Corpus& corpus, const std::vector<std::string>& accounts);

inline constexpr double kDefaultDamping = 0.85;
inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr std::size_t kDefaultMaxIter = 1000;

/// Weighted PageRank; dangling mass is spread uniformly. Converged once the L1
/// change between iterates drops below `tol`.
Scores pagerank(const ConversationGraph& g, double damping = kDefaultDamping,
                double tol = kDefaultTolerance, std::size_t max_iter = kDefaultMaxIter);

struct HitsResult {
  Scores hub;
  Scores authority;
  bool converged = false;
  bool degenerate = false;  // edgeless graph: all scores zero
  std::size_t iterations = 0;
};

/// HITS on the weighted adjacency; both vectors L2-normalized.
HitsResult hits(const ConversationGraph& g, double tol = kDefaultTolerance,
                std::size_t max_iter = kDefaultMaxIter);

/// Power iteration of (I + A^T) with in-edge weights and L2 normalization. The
/// identity shift shares A's dominant eigenvector and keeps the iteration from
/// collapsing on acyclic graphs.
Scores eigenvector_centrality(const ConversationGraph& g, double tol = kDefaultTolerance,
                              std::size_t max_iter = kDefaultMaxIter);

struct TriangleStats {
  std::vector<std::size_t> triangles;
  Scores clustering;
};

/// Computed on the undirected, unweighted projection.
TriangleStats triangles_and_clustering(const ConversationGraph& g);

struct NetworkOptions {
  double damping = kDefaultDamping;
  double tol = kDefaultTolerance;
  std::size_t max_iter = kDefaultMaxIter;
  /// When set, a non-converged centrality uses its last iterate and is flagged
  /// rather than raising.
  bool accept_last_iterate = false;
};

/// Every network score for every node, computed once.
class NetworkAnalysis {
 public:
  NetworkAnalysis(const ConversationGraph& g, const NetworkOptions& options = {});

  /// authority, hub, triangles, eigenvector, pagerank, clustering.
  textfeat::FeatureVector features(const std::string& account) const;

  const std::vector<std::string>& flags() const { return flags_; }

 private:
  const ConversationGraph* graph_;
  Scores authority_, hub_, eigenvector_, pagerank_, clustering_;
  std::vector<std::size_t> triangles_;
  std::vector<std::string> flags_;
};

textfeat::FeatureVector network_features(const ConversationGraph& g, const std::string& account);

/// Edge list CSV: source,target,weight.
void write_edge_list(const ConversationGraph& g, std::ostream& out, const std::string& header_comment = "");
ConversationGraph read_edge_list(std::istream& in, const std::string& source_name);

}  // namespace acclink::netgraph
