#include "cicdor/representation/gcn.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace cicdor::representation {

BipartiteGraph BipartiteGraph::build(Index num_users, Index num_items,
                                     std::span<const data::Interaction> edges) {
  const std::set<data::Interaction> unique(edges.begin(), edges.end());
  std::vector<double> degree(static_cast<std::size_t>(num_users + num_items), 0.0);
  for (const auto& e : unique) {
    if (e.user < 0 || e.user >= num_users || e.item < 0 || e.item >= num_items) {
      throw std::out_of_range("edge outside graph dimensions");
    }
    degree[static_cast<std::size_t>(e.user)] += 1.0;
    degree[static_cast<std::size_t>(num_users + e.item)] += 1.0;
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : unique) {
    const Index u = e.user;
    const Index v = num_users + e.item;
    const double w = 1.0 / std::sqrt(degree[static_cast<std::size_t>(u)] * degree[static_cast<std::size_t>(v)]);
    trips.emplace_back(u, v, w);
    trips.emplace_back(v, u, w);
  }
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (degree[i] == 0.0) trips.emplace_back(static_cast<Index>(i), static_cast<Index>(i), 1.0);
  }
  BipartiteGraph g;
  g.m_ = num_users;
  g.n_ = num_items;
  g.p_.resize(num_users + num_items, num_users + num_items);
  g.p_.setFromTriplets(trips.begin(), trips.end());
  return g;
}

GraphEmbeddings gcn_propagate(const BipartiteGraph& graph, const ad::Var& e_ui, const ad::Var& e_vi,
                              int layers) {
  if (e_ui.rows() != graph.num_users() || e_vi.rows() != graph.num_items() || e_ui.cols() != e_vi.cols()) {
    throw std::invalid_argument("gcn_propagate: embedding shapes do not match the graph");
  }
  if (layers < 0) throw std::invalid_argument("gcn_propagate: negative layer count");
  const ad::Var stacked[] = {e_ui, e_vi};
  ad::Var h = ad::concat_rows(stacked);
  ad::Var acc = h;
  for (int l = 0; l < layers; ++l) {
    h = ad::sparse_left(graph.propagation(), h);
    acc = acc + h;
  }
  acc = ad::scale(acc, 1.0 / static_cast<double>(layers + 1));
  return {ad::slice_rows(acc, 0, graph.num_users()), ad::slice_rows(acc, graph.num_users(), graph.num_items())};
}

}  // namespace cicdor::representation
