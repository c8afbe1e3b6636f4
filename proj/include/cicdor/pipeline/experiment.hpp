#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/data/splits.hpp"
#include "cicdor/discovery/discovery.hpp"
#include "cicdor/pipeline/config.hpp"
#include "cicdor/pipeline/metrics.hpp"
#include "cicdor/pipeline/model.hpp"
#include "cicdor/pipeline/trainer.hpp"
#include "cicdor/representation/text_encoder.hpp"

namespace cicdor::pipeline {

/// Confounder centroids per domain; an empty matrix turns the branch off.
struct ConfounderSubspaces {
  Matrix source;
  Matrix target;
};

/// Target split for one seed per config.split.
data::OodSplit make_target_split(const RunConfig& cfg, const data::InteractionCorpus& target, double shift_ratio,
                                 std::uint64_t seed);

/// Every source positive is a training pair.
data::OodSplit source_training_split(const data::InteractionCorpus& source);

struct SeedSetup {
  data::OodSplit split;
  std::vector<data::EvalCandidateSet> candidates;
  TrainingSet training;
};

/// Text embeddings, training graphs, negatives and candidate sets for one
/// seed. Reviews on validation and test pairs are kept out of the text.
SeedSetup prepare_seed(const RunConfig& cfg, const data::CorpusPair& corpora, representation::TextEncoderPort& encoder,
                       const ConfounderSubspaces& subspaces, const data::OodSplit& split, std::uint64_t seed);

/// Path used at inference: phase-2 switches when phase 2 ran, else phase 1.
PathSwitches inference_switches(const RunConfig& cfg);

/// Rank of each set's positive among its 100 candidates under the target
/// predictor.
std::vector<int> rank_candidates(const ModelParams& params, const TrainingSet& inputs, const RunConfig& cfg,
                                 const std::vector<data::EvalCandidateSet>& sets);

MetricsReport evaluate(const ModelParams& params, const TrainingSet& inputs, const RunConfig& cfg,
                       const std::vector<data::EvalCandidateSet>& sets);

struct SeedResult {
  std::uint64_t seed = 0;
  double ratio = 0.0;
  MetricsReport metrics;
  TrainReport report;
};

/// prepare_seed, ModelParams::init, train_two_phase and evaluate.
SeedResult run_seed(const RunConfig& cfg, const data::CorpusPair& corpora, representation::TextEncoderPort& encoder,
                    const ConfounderSubspaces& subspaces, double shift_ratio, std::uint64_t seed,
                    ModelParams* trained = nullptr, const ProgressFn& progress = {});

struct MetricsRow {
  std::string setting;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  double hr10 = 0.0;
  double ndcg10 = 0.0;
};

/// "# config_hash=<hash>" then the header setting,ratio,seed,hr10,ndcg10 and
/// one row per entry.
void write_metrics_csv(std::ostream& out, const std::string& config_hash, const std::vector<MetricsRow>& rows);

/// Mean over seeds of each (setting, ratio) group, in first-seen order.
std::vector<MetricsRow> mean_by_group(const std::vector<MetricsRow>& rows);

/// Setting label of the config's target split, e.g. "user_degree_shift".
std::string setting_label(const RunConfig& cfg);

/// Trains and evaluates every seed at every ratio. Each ratio gets freshly
/// drawn splits, so no model sees its own test pairs during training.
std::vector<MetricsRow> shift_sweep(const RunConfig& cfg, const data::CorpusPair& corpora,
                                    representation::TextEncoderPort& encoder, const ConfounderSubspaces& subspaces,
                                    const std::vector<double>& ratios, const ProgressFn& progress = {});

/// Every seed at config.split.shift_ratio under `variant`. The setting column
/// reads "<split setting>:<variant>".
std::vector<MetricsRow> ablate(const RunConfig& cfg, Variant variant, const data::CorpusPair& corpora,
                               representation::TextEncoderPort& encoder, const ConfounderSubspaces& subspaces,
                               const ProgressFn& progress = {});

struct DomainDiscovery {
  discovery::ConfounderPool pool;
  discovery::ConfounderSubspace subspace;
  std::vector<discovery::RoundTrace> rounds;
  bool converged = false;
};

/// Confounder discovery over one domain's reviews followed by the subspace
/// build. `direct` swaps the iterative loop for one extraction prompt.
DomainDiscovery discover_domain(const RunConfig& cfg, const data::InteractionCorpus& corpus,
                                discovery::LlmSession& llm, representation::TextEncoderPort& encoder,
                                std::uint64_t seed, bool direct);

}  // namespace cicdor::pipeline
