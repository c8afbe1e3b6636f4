#include "cicdor/causal/dag.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cicdor::causal {

std::string to_string(DagLevel level) { return level == DagLevel::Specific ? "specific" : "shared"; }

DagLevel dag_level_from_string(const std::string& s) {
  if (s == "specific") return DagLevel::Specific;
  if (s == "shared") return DagLevel::Shared;
  throw std::invalid_argument("unknown DAG level '" + s + "'");
}

AdjacencyDag AdjacencyDag::init(Index k, DagLevel level, numerics::Rng& rng, double scale) {
  if (k <= 0) throw std::invalid_argument("AdjacencyDag: k must be positive");
  Matrix a(2 * k, 2 * k);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = i == j ? 0.0 : scale * rng.normal();
  return {ad::Var::parameter(std::move(a)), level, k};
}

ad::Var AdjacencyDag::attr_to_pref() const { return ad::slice_rows(ad::slice_cols(a, k, k), 0, k); }

void save_dag(const std::filesystem::path& path, const AdjacencyDag& dag) {
  const Matrix& a = dag.a.value();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) flat.push_back(a(i, j));
  nlohmann::json j{{"level", to_string(dag.level)}, {"k", dag.k}, {"a", flat}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
}

AdjacencyDag load_dag(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  const Index k = j.at("k").get<Index>();
  const auto flat = j.at("a").get<std::vector<double>>();
  if (k <= 0 || flat.size() != static_cast<std::size_t>(4 * k * k)) {
    throw std::runtime_error(path.string() + ": a does not hold (2k)^2 entries");
  }
  Matrix a(2 * k, 2 * k);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index c = 0; c < a.cols(); ++c) a(i, c) = flat[static_cast<std::size_t>(i * a.cols() + c)];
  return {ad::Var::parameter(std::move(a)), dag_level_from_string(j.at("level").get<std::string>()), k};
}

Matrix threshold_graph(const Matrix& a, double threshold) {
  Matrix g = (a.array().abs() > threshold).cast<double>().matrix();
  g.diagonal().setZero();
  return g;
}

int structural_hamming_distance(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("structural_hamming_distance: shapes differ");
  }
  int shd = 0;
  const Index d = truth.rows();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const bool e_ij = estimate(i, j) != 0, e_ji = estimate(j, i) != 0;
      const bool t_ij = truth(i, j) != 0, t_ji = truth(j, i) != 0;
      if (e_ij != t_ij || e_ji != t_ji) ++shd;
    }
  }
  return shd;
}

}  // namespace cicdor::causal
