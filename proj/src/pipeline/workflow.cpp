#include "cicdor/pipeline/workflow.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cicdor/data/io.hpp"
#include "cicdor/discovery/mock_llm.hpp"
#include "cicdor/synthetic/cross_domain.hpp"
#include "cicdor/synthetic/review_corpus.hpp"

namespace cicdor::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path Layout::pool(const std::string& domain, bool direct) const {
  return confounder_dir() / (domain + (direct ? "_direct" : "") + "_pool.json");
}

fs::path Layout::subspace(const std::string& domain, bool direct) const {
  return confounder_dir() / (domain + (direct ? "_direct" : "") + "_subspace.json");
}

fs::path Layout::checkpoint(std::uint64_t seed) const {
  return checkpoint_dir() / ("seed" + std::to_string(seed));
}

Layout layout(const RunConfig& cfg) { return {cfg.output_dir}; }

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

json pool_document(const RunConfig& cfg, const std::string& domain, bool direct, const DomainDiscovery& d) {
  std::ostringstream pool;
  discovery::write_pool(pool, d.pool);
  return {{"config_hash", config_hash(cfg)},
          {"domain", domain},
          {"method", direct ? "direct" : "iterative"},
          {"rounds", d.rounds.size()},
          {"converged", d.converged},
          {"confounders", json::parse(pool.str())}};
}

json subspace_document(const RunConfig& cfg, const std::string& domain, const DomainDiscovery& d) {
  std::ostringstream s;
  discovery::write_subspace(s, d.subspace);
  return {{"config_hash", config_hash(cfg)}, {"domain", domain}, {"subspace", json::parse(s.str())}};
}

Matrix read_subspace_file(const fs::path& path) {
  const auto j = read_json(path);
  if (!j.contains("subspace")) throw std::runtime_error(path.string() + ": no subspace");
  std::istringstream in(j.at("subspace").dump());
  return discovery::read_subspace(in).centroids;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t discovery_seed(const RunConfig& cfg) { return cfg.seeds.empty() ? 0 : cfg.seeds.front(); }

}  // namespace

RunConfig prepare_data(RunConfig cfg, std::optional<std::uint64_t> synthetic_seed) {
  const Layout out = layout(cfg);
  if (synthetic_seed) {
    const auto d = synthetic::cross_domain_benchmark(*synthetic_seed);
    cfg.source_events = fs::absolute(out.data_dir() / "source_events.jsonl");
    cfg.target_events = fs::absolute(out.data_dir() / "target_events.jsonl");
    fs::create_directories(out.data_dir());
    data::save_events(cfg.source_events, d.source);
    data::save_events(cfg.target_events, d.target);
  }
  const auto corpora = load_corpora(cfg);
  for (const auto seed : cfg.seeds) {
    const auto split = make_target_split(cfg, corpora.target, cfg.split.shift_ratio, seed);
    const auto dir = out.data_dir() / ("seed" + std::to_string(seed));
    fs::create_directories(dir);
    data::save_split(dir / "split.json", split, corpora.target);
    data::save_candidates(dir / "candidates.json",
                          data::build_eval_candidates(split, corpora.target, numerics::mix_seed(seed, 3)),
                          corpora.target);
  }
  save_config(out.config(), cfg);
  return cfg;
}

data::CorpusPair load_corpora(const RunConfig& cfg) {
  if (cfg.source_events.empty() || cfg.target_events.empty())
    throw std::runtime_error("config needs source_events and target_events");
  const auto s = data::load_events(cfg.source_events);
  const auto t = data::load_events(cfg.target_events);
  return data::make_corpus_pair(s, t);
}

std::unique_ptr<representation::TextEncoderPort> make_encoder(const RunConfig& cfg) {
  if (cfg.encoder.mock) return std::make_unique<representation::MockTextEncoder>(cfg.encoder.mock_seed);
  return std::make_unique<representation::HttpTextEncoder>(
      transport::Endpoint{cfg.encoder.base_url, cfg.encoder.path, cfg.encoder.api_key_env, cfg.llm.timeout_seconds},
      cfg.encoder.model);
}

std::unique_ptr<discovery::LlmPort> make_llm(const RunConfig& cfg, bool mock) {
  if (mock || cfg.llm.mock) return std::make_unique<discovery::MockLlm>(discovery::MockWorld{synthetic::planted_variables()});
  return std::make_unique<discovery::HttpChatLlm>(
      transport::Endpoint{cfg.llm.base_url, cfg.llm.path, cfg.llm.api_key_env, cfg.llm.timeout_seconds}, cfg.llm.model);
}

DiscoveryArtifacts discover_confounders(const RunConfig& cfg, discovery::LlmPort& llm,
                                        representation::TextEncoderPort& encoder) {
  const Layout out = layout(cfg);
  const auto corpora = load_corpora(cfg);
  auto log_file = open_out(out.replay_log());
  discovery::ReplayLog log(log_file);
  discovery::LlmSession session(llm, &log, static_cast<std::size_t>(cfg.llm.parallelism));
  const auto seed = discovery_seed(cfg);

  DiscoveryArtifacts a;
  a.source = discover_domain(cfg, corpora.source, session, encoder, seed, false);
  a.target = discover_domain(cfg, corpora.target, session, encoder, seed, false);
  a.source_direct = discover_domain(cfg, corpora.source, session, encoder, seed, true);
  a.target_direct = discover_domain(cfg, corpora.target, session, encoder, seed, true);

  const std::pair<const char*, const DomainDiscovery*> items[] = {
      {"source", &a.source}, {"target", &a.target}, {"source", &a.source_direct}, {"target", &a.target_direct}};
  for (std::size_t i = 0; i < 4; ++i) {
    const bool direct = i >= 2;
    write_json(out.pool(items[i].first, direct), pool_document(cfg, items[i].first, direct, *items[i].second));
    write_json(out.subspace(items[i].first, direct), subspace_document(cfg, items[i].first, *items[i].second));
  }
  return a;
}

bool replay_discovery(const RunConfig& cfg, const fs::path& log, representation::TextEncoderPort& encoder) {
  std::ifstream in(log);
  if (!in) throw std::runtime_error("cannot read " + log.string());
  discovery::ReplayLlm llm(discovery::read_replay(in));
  discovery::LlmSession session(llm);
  const Layout out = layout(cfg);
  const auto corpora = load_corpora(cfg);
  const auto seed = discovery_seed(cfg);
  bool same = true;
  for (const bool direct : {false, true}) {
    for (const char* domain : {"source", "target"}) {
      const auto& corpus = std::string(domain) == "source" ? corpora.source : corpora.target;
      const auto d = discover_domain(cfg, corpus, session, encoder, seed, direct);
      const auto path = out.confounder_dir() / ("replayed_" + out.pool(domain, direct).filename().string());
      write_json(path, pool_document(cfg, domain, direct, d));
      const auto recorded = out.pool(domain, direct);
      same = same && fs::exists(recorded) && file_bytes(recorded) == file_bytes(path);
    }
  }
  return same;
}

ConfounderSubspaces load_subspaces(const RunConfig& cfg, Variant variant) {
  if (!phase_switches(variant, 2).confounders) return {};
  const bool direct = variant == Variant::DirectLlm;
  const Layout out = layout(cfg);
  for (const char* domain : {"source", "target"}) {
    if (!fs::exists(out.subspace(domain, direct)))
      throw std::runtime_error("missing " + out.subspace(domain, direct).string() + "; run discover-confounders first");
  }
  return {read_subspace_file(out.subspace("source", direct)), read_subspace_file(out.subspace("target", direct))};
}

void write_metrics_file(const fs::path& path, const RunConfig& cfg, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  write_metrics_csv(out, config_hash(cfg), rows);
}

std::vector<MetricsRow> train_all(const RunConfig& cfg, representation::TextEncoderPort& encoder,
                                  const ProgressFn& progress) {
  const Layout out = layout(cfg);
  const auto corpora = load_corpora(cfg);
  const auto subspaces = load_subspaces(cfg, cfg.variant);
  std::vector<MetricsRow> rows;
  for (const auto seed : cfg.seeds) {
    ModelParams params;
    const auto r = run_seed(cfg, corpora, encoder, subspaces, cfg.split.shift_ratio, seed, &params, progress);
    const json meta = {{"config_hash", config_hash(cfg)},
                       {"seed", seed},
                       {"ratio", cfg.split.shift_ratio},
                       {"variant", to_string(cfg.variant)},
                       {"acyclicity_h", r.report.escalation.h},
                       {"escalations", r.report.escalation.escalations}};
    Checkpoint ck = snapshot(params.named());
    ck.meta = meta;
    fs::create_directories(out.checkpoint_dir());
    save_checkpoint(out.checkpoint(seed), ck);
    Checkpoint p1 = r.report.phase1;
    p1.meta = meta;
    p1.meta["phase"] = 1;
    save_checkpoint(out.checkpoint(seed).string() + "_phase1", p1);
    rows.push_back({setting_label(cfg), cfg.split.shift_ratio, seed, r.metrics.hr_at_10, r.metrics.ndcg_at_10});
  }
  write_metrics_file(out.metrics_dir() / "train.csv", cfg, rows);
  return rows;
}

MetricsRow evaluate_checkpoint(const RunConfig& cfg, representation::TextEncoderPort& encoder, std::uint64_t seed,
                               const fs::path& stem) {
  const auto corpora = load_corpora(cfg);
  const auto subspaces = load_subspaces(cfg, cfg.variant);
  const auto split = make_target_split(cfg, corpora.target, cfg.split.shift_ratio, seed);
  const auto setup = prepare_seed(cfg, corpora, encoder, subspaces, split, seed);
  numerics::Rng rng(0);
  ModelParams params = ModelParams::init(cfg.shape(), corpora.target.num_users(), rng);
  auto named = params.named();
  restore(load_checkpoint(stem), named);
  const auto m = evaluate(params, setup.training, cfg, setup.candidates);
  const MetricsRow row{setting_label(cfg), cfg.split.shift_ratio, seed, m.hr_at_10, m.ndcg_at_10};
  write_metrics_file(layout(cfg).metrics_dir() / "evaluate.csv", cfg, {row});
  return row;
}

std::vector<MetricsRow> sweep_all(const RunConfig& cfg, representation::TextEncoderPort& encoder,
                                  const ProgressFn& progress) {
  const auto corpora = load_corpora(cfg);
  const auto rows = shift_sweep(cfg, corpora, encoder, load_subspaces(cfg, cfg.variant), cfg.sweep_ratios, progress);
  write_metrics_file(layout(cfg).metrics_dir() / "sweep.csv", cfg, rows);
  return rows;
}

std::vector<MetricsRow> ablate_all(const RunConfig& cfg, const std::vector<Variant>& variants,
                                   representation::TextEncoderPort& encoder, const ProgressFn& progress) {
  const auto corpora = load_corpora(cfg);
  std::vector<MetricsRow> rows;
  for (const Variant v : variants) {
    const auto part = ablate(cfg, v, corpora, encoder, load_subspaces(cfg, v), progress);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_metrics_file(layout(cfg).metrics_dir() / "ablation.csv", cfg, rows);
  return rows;
}

}  // namespace cicdor::pipeline
