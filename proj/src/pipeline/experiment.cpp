#include "cicdor/pipeline/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace cicdor::pipeline {

data::OodSplit make_target_split(const RunConfig& cfg, const data::InteractionCorpus& target, double shift_ratio,
                                 std::uint64_t seed) {
  switch (cfg.split.setting) {
    case data::SplitSetting::UserDegreeShift:
      return data::split_ood_degree(target, shift_ratio, seed);
    case data::SplitSetting::RegionShift:
      if (cfg.split.region.empty()) throw ConfigError("region shift needs config.split.region");
      return data::split_ood_region(target, cfg.split.region, shift_ratio, seed);
    case data::SplitSetting::Iid:
      break;
  }
  return data::split_iid(target, seed);
}

data::OodSplit source_training_split(const data::InteractionCorpus& source) {
  data::OodSplit s;
  s.train = data::to_implicit(source.events()).positives;
  return s;
}

SeedSetup prepare_seed(const RunConfig& cfg, const data::CorpusPair& corpora, representation::TextEncoderPort& encoder,
                       const ConfounderSubspaces& subspaces, const data::OodSplit& split, std::uint64_t seed) {
  SeedSetup s;
  s.split = split;
  std::vector<data::Interaction> held_out = split.val;
  held_out.insert(held_out.end(), split.test.begin(), split.test.end());
  std::sort(held_out.begin(), held_out.end());

  const auto src_split = source_training_split(corpora.source);
  auto& t = s.training;
  t.source.text = representation::encode_corpus(corpora.source, encoder);
  t.target.text = representation::encode_corpus(corpora.target, encoder, {}, held_out);
  t.source.graph =
      representation::BipartiteGraph::build(corpora.source.num_users(), corpora.source.num_items(), src_split.train);
  t.target.graph =
      representation::BipartiteGraph::build(corpora.target.num_users(), corpora.target.num_items(), split.train);
  t.source.confounders = subspaces.source;
  t.target.confounders = subspaces.target;
  t.pairs_t = data::sample_negatives(split, corpora.target.num_items(), numerics::mix_seed(seed, 1),
                                     cfg.split.negatives).pairs;
  t.pairs_s = data::sample_negatives(src_split, corpora.source.num_items(), numerics::mix_seed(seed, 2),
                                     cfg.split.negatives).pairs;
  s.candidates = data::build_eval_candidates(split, corpora.target, numerics::mix_seed(seed, 3));
  return s;
}

PathSwitches inference_switches(const RunConfig& cfg) {
  return phase_switches(cfg.variant, cfg.epochs_phase2 > 0 ? 2 : 1);
}

std::vector<int> rank_candidates(const ModelParams& params, const TrainingSet& inputs, const RunConfig& cfg,
                                 const std::vector<data::EvalCandidateSet>& sets) {
  std::vector<int> ranks;
  if (sets.empty()) return ranks;
  const PathSwitches sw = inference_switches(cfg);
  const auto f = forward(params, inputs.source, inputs.target, sw, cfg.loss.gamma, cfg.grl_lambda, cfg.gcn_layers,
                         cfg.causal);
  std::vector<Index> users, items;
  for (const auto& s : sets) {
    users.push_back(s.user);
    items.push_back(s.positive_item);
    for (const Index n : s.negatives) {
      users.push_back(s.user);
      items.push_back(n);
    }
  }
  const Matrix scores =
      score_pairs(f.user_t, f.item_t, users, items, inputs.target.confounders, sw.confounders, params.pred_t).value();
  std::size_t row = 0;
  for (const auto& s : sets) {
    const std::size_t width = s.negatives.size() + 1;
    std::vector<double> sc(width);
    for (std::size_t i = 0; i < width; ++i) sc[i] = scores(static_cast<Index>(row + i), 0);
    const std::span<const Index> ids(items.data() + row, width);
    ranks.push_back(rank_of_positive(s.positive_item, sc[0], ids, sc));
    row += width;
  }
  return ranks;
}

MetricsReport evaluate(const ModelParams& params, const TrainingSet& inputs, const RunConfig& cfg,
                       const std::vector<data::EvalCandidateSet>& sets) {
  return summarize(rank_candidates(params, inputs, cfg, sets));
}

SeedResult run_seed(const RunConfig& cfg, const data::CorpusPair& corpora, representation::TextEncoderPort& encoder,
                    const ConfounderSubspaces& subspaces, double shift_ratio, std::uint64_t seed, ModelParams* trained,
                    const ProgressFn& progress) {
  const auto split = make_target_split(cfg, corpora.target, shift_ratio, seed);
  const auto setup = prepare_seed(cfg, corpora, encoder, subspaces, split, seed);
  numerics::Rng rng(numerics::mix_seed(seed, 0x696e6974ULL));
  ModelParams params = ModelParams::init(cfg.shape(), corpora.target.num_users(), rng);
  SeedResult r;
  r.seed = seed;
  r.ratio = shift_ratio;
  r.report = train_two_phase(params, setup.training, cfg, seed, progress);
  r.metrics = evaluate(params, setup.training, cfg, setup.candidates);
  if (trained) *trained = std::move(params);
  return r;
}

void write_metrics_csv(std::ostream& out, const std::string& config_hash, const std::vector<MetricsRow>& rows) {
  out << "# config_hash=" << config_hash << '\n';
  out << "setting,ratio,seed,hr10,ndcg10\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.2f,%llu,%.6f,%.6f\n", r.setting.c_str(), r.ratio,
                  static_cast<unsigned long long>(r.seed), r.hr10, r.ndcg10);
    out << buf;
  }
}

std::vector<MetricsRow> mean_by_group(const std::vector<MetricsRow>& rows) {
  std::vector<MetricsRow> out;
  std::vector<std::size_t> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MetricsRow& m) { return m.setting == r.setting && m.ratio == r.ratio; });
    if (it == out.end()) {
      out.push_back({r.setting, r.ratio, 0, 0.0, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const auto i = static_cast<std::size_t>(it - out.begin());
    it->hr10 += r.hr10;
    it->ndcg10 += r.ndcg10;
    ++counts[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].hr10 /= static_cast<double>(counts[i]);
    out[i].ndcg10 /= static_cast<double>(counts[i]);
  }
  return out;
}

std::string setting_label(const RunConfig& cfg) {
  std::string label = data::to_string(cfg.split.setting);
  if (cfg.split.setting == data::SplitSetting::RegionShift) label += "(" + cfg.split.region + ")";
  return label;
}

std::vector<MetricsRow> shift_sweep(const RunConfig& cfg, const data::CorpusPair& corpora,
                                    representation::TextEncoderPort& encoder, const ConfounderSubspaces& subspaces,
                                    const std::vector<double>& ratios, const ProgressFn& progress) {
  std::vector<MetricsRow> rows;
  for (const double ratio : ratios) {
    for (const auto seed : cfg.seeds) {
      const auto r = run_seed(cfg, corpora, encoder, subspaces, ratio, seed, nullptr, progress);
      rows.push_back({setting_label(cfg), ratio, seed, r.metrics.hr_at_10, r.metrics.ndcg_at_10});
    }
  }
  return rows;
}

std::vector<MetricsRow> ablate(const RunConfig& cfg, Variant variant, const data::CorpusPair& corpora,
                               representation::TextEncoderPort& encoder, const ConfounderSubspaces& subspaces,
                               const ProgressFn& progress) {
  RunConfig c = cfg;
  c.variant = variant;
  std::vector<MetricsRow> rows;
  for (const auto seed : c.seeds) {
    const auto r = run_seed(c, corpora, encoder, subspaces, c.split.shift_ratio, seed, nullptr, progress);
    rows.push_back({setting_label(c) + ":" + to_string(variant), c.split.shift_ratio, seed, r.metrics.hr_at_10,
                    r.metrics.ndcg_at_10});
  }
  return rows;
}

DomainDiscovery discover_domain(const RunConfig& cfg, const data::InteractionCorpus& corpus,
                                discovery::LlmSession& llm, representation::TextEncoderPort& encoder,
                                std::uint64_t seed, bool direct) {
  const auto reviews = discovery::review_corpus(corpus, seed, static_cast<std::size_t>(cfg.review_users),
                                                static_cast<std::size_t>(cfg.reviews_per_user));
  DomainDiscovery out;
  if (direct) {
    out.pool = discovery::direct_llm_confounders(reviews, llm, seed);
    out.converged = true;
  } else {
    discovery::DiscoveryOptions o;
    o.max_rounds = cfg.tau_max;
    o.seed = seed;
    auto r = discovery::run_discovery(reviews, llm, o);
    out.pool = std::move(r.pool);
    out.rounds = std::move(r.rounds);
    out.converged = r.converged;
  }
  if (!out.pool.entries.empty()) out.subspace = discovery::build_subspace(out.pool, encoder, cfg.k, cfg.confounders_j, seed);
  return out;
}

}  // namespace cicdor::pipeline
