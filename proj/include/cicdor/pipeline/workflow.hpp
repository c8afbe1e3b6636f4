#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cicdor/discovery/llm.hpp"
#include "cicdor/pipeline/experiment.hpp"

namespace cicdor::pipeline {

/// Artifact locations under config.output_dir.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path data_dir() const { return root / "data"; }
  std::filesystem::path confounder_dir() const { return root / "confounders"; }
  std::filesystem::path checkpoint_dir() const { return root / "checkpoints"; }
  std::filesystem::path metrics_dir() const { return root / "metrics"; }
  /// <domain>[_direct]_pool.json
  std::filesystem::path pool(const std::string& domain, bool direct) const;
  std::filesystem::path subspace(const std::string& domain, bool direct) const;
  std::filesystem::path replay_log() const { return confounder_dir() / "llm_replay.jsonl"; }
  std::filesystem::path checkpoint(std::uint64_t seed) const;
};

Layout layout(const RunConfig& cfg);

/// Writes the resolved config, and per seed the target split and candidate
/// sets at split.shift_ratio. With `synthetic_seed` the cross-domain
/// benchmark is generated first and its event files become the inputs.
/// Returns the resolved config.
RunConfig prepare_data(RunConfig cfg, std::optional<std::uint64_t> synthetic_seed = std::nullopt);

data::CorpusPair load_corpora(const RunConfig& cfg);
std::unique_ptr<representation::TextEncoderPort> make_encoder(const RunConfig& cfg);
/// Mock model when `mock` or llm.mock is set, else the HTTP endpoint with the
/// key read from the environment variable llm.api_key_env.
std::unique_ptr<discovery::LlmPort> make_llm(const RunConfig& cfg, bool mock);

struct DiscoveryArtifacts {
  DomainDiscovery source, target, source_direct, target_direct;
};

/// Iterative and direct discovery on both domains. Writes pools, subspaces
/// and the replay log of every model call.
DiscoveryArtifacts discover_confounders(const RunConfig& cfg, discovery::LlmPort& llm,
                                        representation::TextEncoderPort& encoder);

/// Reruns discovery against a recorded log and writes replayed_* pools.
/// Returns true when they equal the recorded pools byte for byte.
bool replay_discovery(const RunConfig& cfg, const std::filesystem::path& log,
                      representation::TextEncoderPort& encoder);

/// Empty when the variant runs without confounders.
ConfounderSubspaces load_subspaces(const RunConfig& cfg, Variant variant);

/// Trains every seed at split.shift_ratio, saves final and phase-1
/// checkpoints and writes metrics/train.csv.
std::vector<MetricsRow> train_all(const RunConfig& cfg, representation::TextEncoderPort& encoder,
                                  const ProgressFn& progress = {});

/// Scores a saved checkpoint on its seed's test candidates and writes
/// metrics/evaluate.csv.
MetricsRow evaluate_checkpoint(const RunConfig& cfg, representation::TextEncoderPort& encoder, std::uint64_t seed,
                               const std::filesystem::path& stem);

/// metrics/sweep.csv over config.sweep_ratios.
std::vector<MetricsRow> sweep_all(const RunConfig& cfg, representation::TextEncoderPort& encoder,
                                  const ProgressFn& progress = {});

/// metrics/ablation.csv over the given variants.
std::vector<MetricsRow> ablate_all(const RunConfig& cfg, const std::vector<Variant>& variants,
                                   representation::TextEncoderPort& encoder, const ProgressFn& progress = {});

void write_metrics_file(const std::filesystem::path& path, const RunConfig& cfg, const std::vector<MetricsRow>& rows);

}  // namespace cicdor::pipeline
