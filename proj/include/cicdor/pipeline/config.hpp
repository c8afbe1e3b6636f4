#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cicdor/causal/fit.hpp"
#include "cicdor/data/splits.hpp"
#include "cicdor/predict/predictor.hpp"

namespace cicdor::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { Full, WithoutDualLevel, WithoutSpecificLevel, WithoutSharedLevel, WithoutConfounder, DirectLlm };

/// Display labels: "full", "w/o dual-level", "w/o specific-level",
/// "w/o shared-level", "w/o confounder", "w/ direct-LLM".
std::string to_string(Variant v);
/// Accepts the display labels and the identifiers full, wo_dual_level,
/// wo_specific_level, wo_shared_level, wo_confounder, w_direct_llm.
Variant variant_from_string(const std::string& s);
const std::vector<Variant>& all_variants();
std::vector<std::string> variant_names(const std::vector<Variant>& vs);

struct LlmSettings {
  bool mock = true;
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "CICDOR_LLM_API_KEY";
  std::string model;
  int timeout_seconds = 120;
  int parallelism = 4;
};

struct EncoderSettings {
  bool mock = true;
  std::uint64_t mock_seed = 0;
  std::string base_url;
  std::string path = "/v1/embeddings";
  std::string api_key_env = "CICDOR_EMBED_API_KEY";
  std::string model;
};

struct SplitSettings {
  data::SplitSetting setting = data::SplitSetting::UserDegreeShift;
  double shift_ratio = 1.0;
  std::string region;  // region shift only
  int negatives = 3;
};

struct RunConfig {
  std::filesystem::path source_events;
  std::filesystem::path target_events;
  std::filesystem::path output_dir = "out";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  Index k = 64;
  predict::PredictorShape predictor;  // k is overwritten by the field above
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs_phase1 = 60;
  int epochs_phase2 = 40;
  int gcn_layers = 2;
  double grl_lambda = 1.0;
  predict::LossWeights loss;
  causal::CausalLossWeights causal;
  causal::AcyclicityPolicy acyclicity;

  Index confounders_j = 10;
  int tau_max = 3;
  int review_users = 1000;
  int reviews_per_user = 5;

  SplitSettings split;
  LlmSettings llm;
  EncoderSettings encoder;
  Variant variant = Variant::Full;
  // Phase-2 predictions go through the invariant preferences during training
  // too; when false they are used at inference only.
  bool invariant_training = true;
  std::vector<double> sweep_ratios = {0.4, 0.6, 0.8, 1.0};
  std::vector<Variant> ablation_variants = all_variants();

  predict::PredictorShape shape() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are an error.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& c);

/// 16 hex digits identifying the serialized configuration.
std::string config_hash(const RunConfig& c);

}  // namespace cicdor::pipeline
