#include "cicdor/pipeline/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "cicdor/representation/text_encoder.hpp"

namespace cicdor::pipeline {

using nlohmann::json;

namespace {

struct VariantName {
  Variant v;
  const char* label;
  const char* id;
};

constexpr VariantName kVariantNames[] = {
    {Variant::Full, "full", "full"},
    {Variant::WithoutDualLevel, "w/o dual-level", "wo_dual_level"},
    {Variant::WithoutSpecificLevel, "w/o specific-level", "wo_specific_level"},
    {Variant::WithoutSharedLevel, "w/o shared-level", "wo_shared_level"},
    {Variant::WithoutConfounder, "w/o confounder", "wo_confounder"},
    {Variant::DirectLlm, "w/ direct-LLM", "w_direct_llm"},
};

// Reads j[key] into out when present and records the key as known.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!known_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> known_;
};

}  // namespace

std::string to_string(Variant v) {
  for (const auto& n : kVariantNames)
    if (n.v == v) return n.label;
  return "full";
}

Variant variant_from_string(const std::string& s) {
  for (const auto& n : kVariantNames)
    if (s == n.label || s == n.id) return n.v;
  throw ConfigError("unknown ablation variant '" + s + "'");
}

std::vector<std::string> variant_names(const std::vector<Variant>& vs) {
  std::vector<std::string> out;
  for (const Variant v : vs) out.push_back(to_string(v));
  return out;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {Variant::Full,
                                         Variant::WithoutDualLevel,
                                         Variant::WithoutSpecificLevel,
                                         Variant::WithoutSharedLevel,
                                         Variant::WithoutConfounder,
                                         Variant::DirectLlm};
  return v;
}

predict::PredictorShape RunConfig::shape() const {
  auto s = predictor;
  s.k = k;
  return s;
}

json to_json(const RunConfig& c) {
  return json{
      {"source_events", c.source_events.string()},
      {"target_events", c.target_events.string()},
      {"output_dir", c.output_dir.string()},
      {"seeds", c.seeds},
      {"k", c.k},
      {"predictor", {{"k_in", c.predictor.k_in}, {"hidden", c.predictor.hidden}, {"k_out", c.predictor.k_out}}},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"epochs_phase1", c.epochs_phase1},
      {"epochs_phase2", c.epochs_phase2},
      {"gcn_layers", c.gcn_layers},
      {"grl_lambda", c.grl_lambda},
      {"loss",
       {{"beta1", c.loss.beta1},
        {"beta2", c.loss.beta2},
        {"beta3", c.loss.beta3},
        {"beta4", c.loss.beta4},
        {"gamma", c.loss.gamma}}},
      {"causal",
       {{"alpha1", c.causal.alpha1},
        {"alpha2", c.causal.alpha2},
        {"alpha3", c.causal.alpha3},
        {"alpha4", c.causal.alpha4}}},
      {"acyclicity",
       {{"tolerance", c.acyclicity.tolerance},
        {"max_escalations", c.acyclicity.max_escalations},
        {"extra_epochs", c.acyclicity.extra_epochs},
        {"factor", c.acyclicity.factor},
        {"lr_decay", c.acyclicity.lr_decay}}},
      {"confounders_j", c.confounders_j},
      {"tau_max", c.tau_max},
      {"review_users", c.review_users},
      {"reviews_per_user", c.reviews_per_user},
      {"split",
       {{"setting", data::to_string(c.split.setting)},
        {"shift_ratio", c.split.shift_ratio},
        {"region", c.split.region},
        {"negatives", c.split.negatives}}},
      {"llm",
       {{"mock", c.llm.mock},
        {"base_url", c.llm.base_url},
        {"path", c.llm.path},
        {"api_key_env", c.llm.api_key_env},
        {"model", c.llm.model},
        {"timeout_seconds", c.llm.timeout_seconds},
        {"parallelism", c.llm.parallelism}}},
      {"encoder",
       {{"mock", c.encoder.mock},
        {"mock_seed", c.encoder.mock_seed},
        {"base_url", c.encoder.base_url},
        {"path", c.encoder.path},
        {"api_key_env", c.encoder.api_key_env},
        {"model", c.encoder.model}}},
      {"variant", to_string(c.variant)},
      {"invariant_training", c.invariant_training},
      {"sweep_ratios", c.sweep_ratios},
      {"ablation_variants", variant_names(c.ablation_variants)},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  std::string path;
  path = c.source_events.string();
  r.get("source_events", path);
  c.source_events = path;
  path = c.target_events.string();
  r.get("target_events", path);
  c.target_events = path;
  path = c.output_dir.string();
  r.get("output_dir", path);
  c.output_dir = path;
  r.get("seeds", c.seeds);
  r.get("k", c.k);
  if (const json* p = r.sub("predictor")) {
    Reader s(*p, "config.predictor");
    s.get("k_in", c.predictor.k_in);
    s.get("hidden", c.predictor.hidden);
    s.get("k_out", c.predictor.k_out);
    s.finish();
  }
  r.get("learning_rate", c.learning_rate);
  r.get("batch_size", c.batch_size);
  r.get("epochs_phase1", c.epochs_phase1);
  r.get("epochs_phase2", c.epochs_phase2);
  r.get("gcn_layers", c.gcn_layers);
  r.get("grl_lambda", c.grl_lambda);
  if (const json* p = r.sub("loss")) {
    Reader s(*p, "config.loss");
    s.get("beta1", c.loss.beta1);
    s.get("beta2", c.loss.beta2);
    s.get("beta3", c.loss.beta3);
    s.get("beta4", c.loss.beta4);
    s.get("gamma", c.loss.gamma);
    s.finish();
  }
  if (const json* p = r.sub("causal")) {
    Reader s(*p, "config.causal");
    s.get("alpha1", c.causal.alpha1);
    s.get("alpha2", c.causal.alpha2);
    s.get("alpha3", c.causal.alpha3);
    s.get("alpha4", c.causal.alpha4);
    s.finish();
  }
  if (const json* p = r.sub("acyclicity")) {
    Reader s(*p, "config.acyclicity");
    s.get("tolerance", c.acyclicity.tolerance);
    s.get("max_escalations", c.acyclicity.max_escalations);
    s.get("extra_epochs", c.acyclicity.extra_epochs);
    s.get("factor", c.acyclicity.factor);
    s.get("lr_decay", c.acyclicity.lr_decay);
    s.finish();
  }
  r.get("confounders_j", c.confounders_j);
  r.get("tau_max", c.tau_max);
  r.get("review_users", c.review_users);
  r.get("reviews_per_user", c.reviews_per_user);
  if (const json* p = r.sub("split")) {
    Reader s(*p, "config.split");
    std::string setting = data::to_string(c.split.setting);
    s.get("setting", setting);
    try {
      c.split.setting = data::split_setting_from_string(setting);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.split.setting: ") + e.what());
    }
    s.get("shift_ratio", c.split.shift_ratio);
    s.get("region", c.split.region);
    s.get("negatives", c.split.negatives);
    s.finish();
  }
  if (const json* p = r.sub("llm")) {
    Reader s(*p, "config.llm");
    s.get("mock", c.llm.mock);
    s.get("base_url", c.llm.base_url);
    s.get("path", c.llm.path);
    s.get("api_key_env", c.llm.api_key_env);
    s.get("model", c.llm.model);
    s.get("timeout_seconds", c.llm.timeout_seconds);
    s.get("parallelism", c.llm.parallelism);
    s.finish();
  }
  if (const json* p = r.sub("encoder")) {
    Reader s(*p, "config.encoder");
    s.get("mock", c.encoder.mock);
    s.get("mock_seed", c.encoder.mock_seed);
    s.get("base_url", c.encoder.base_url);
    s.get("path", c.encoder.path);
    s.get("api_key_env", c.encoder.api_key_env);
    s.get("model", c.encoder.model);
    s.finish();
  }
  std::string variant = to_string(c.variant);
  r.get("variant", variant);
  c.variant = variant_from_string(variant);
  r.get("invariant_training", c.invariant_training);
  r.get("sweep_ratios", c.sweep_ratios);
  std::vector<std::string> ablation = variant_names(c.ablation_variants);
  r.get("ablation_variants", ablation);
  c.ablation_variants.clear();
  for (const auto& name : ablation) c.ablation_variants.push_back(variant_from_string(name));
  r.finish();

  if (c.k < 1) throw ConfigError("config.k must be positive");
  if (c.batch_size < 1) throw ConfigError("config.batch_size must be positive");
  if (c.epochs_phase1 < 0 || c.epochs_phase2 < 0) throw ConfigError("config: epochs must be non-negative");
  if (c.learning_rate <= 0) throw ConfigError("config.learning_rate must be positive");
  if (c.confounders_j < 1) throw ConfigError("config.confounders_j must be positive");
  if (c.seeds.empty()) throw ConfigError("config.seeds must not be empty");
  const auto& l = c.loss;
  if (l.beta1 < 0 || l.beta2 < 0 || l.beta3 < 0 || l.beta4 < 0 || l.gamma < 0 || l.gamma > 1)
    throw ConfigError("config.loss: weights must be non-negative and gamma in [0, 1]");
  for (const double ratio : c.sweep_ratios)
    if (ratio < 0 || ratio > 1) throw ConfigError("config.sweep_ratios: ratios must lie in [0, 1]");
  if (c.split.shift_ratio < 0 || c.split.shift_ratio > 1) throw ConfigError("config.split.shift_ratio must lie in [0, 1]");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json(c).dump(2) << '\n';
}

std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(representation::fnv1a(to_json(c).dump())));
  return buf;
}

}  // namespace cicdor::pipeline
