#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cicdor/pipeline/workflow.hpp"

using namespace cicdor;
using namespace cicdor::pipeline;

namespace {

struct Common {
  std::string config;
  std::string output_dir;
  std::vector<std::uint64_t> seeds;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", c.output_dir, "artifact directory (overrides the config)");
  cmd->add_option("--seeds", c.seeds, "seeds (override the config)");
  cmd->add_flag("-q,--quiet", c.quiet, "no per-epoch progress");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  return cfg;
}

ProgressFn progress(const Common& c) {
  if (c.quiet) return {};
  return [](int phase, int epoch, double loss) { std::fprintf(stderr, "phase %d epoch %d loss %.6f\n", phase, epoch, loss); };
}

void print_rows(const std::vector<MetricsRow>& rows) {
  for (const auto& r : rows)
    std::printf("%s ratio=%.2f seed=%llu hr10=%.6f ndcg10=%.6f\n", r.setting.c_str(), r.ratio,
                static_cast<unsigned long long>(r.seed), r.hr10, r.ndcg10);
}

void print_pool(const char* label, const DomainDiscovery& d) {
  std::printf("%s: %zu confounders, %zu rounds%s\n", label, d.pool.entries.size(), d.rounds.size(),
              d.converged ? ", converged" : "");
  for (const auto& e : d.pool.entries) std::printf("  - %s\n", e.name.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain recommendation with confounder discovery and dual-level causal preferences"};
  app.require_subcommand(1);

  Common prep_c, disc_c, train_c, eval_c, sweep_c, abl_c, replay_c;
  std::optional<std::uint64_t> synthetic;
  bool mock = false;
  std::string checkpoint;
  std::uint64_t eval_seed = 1;
  std::vector<std::string> variant_names_in;
  std::string log_path;

  auto* prep = app.add_subcommand("prepare-data", "write the resolved config, splits and candidate sets");
  add_common(prep, prep_c);
  prep->add_option("--synthetic", synthetic, "generate the synthetic cross-domain benchmark with this seed");

  auto* disc = app.add_subcommand("discover-confounders", "run LLM confounder discovery on both domains");
  add_common(disc, disc_c);
  disc->add_flag("--mock-llm", mock, "use the deterministic mock model");

  auto* train = app.add_subcommand("train", "train every seed and save checkpoints");
  add_common(train, train_c);

  auto* eval = app.add_subcommand("evaluate", "score a saved checkpoint");
  add_common(eval, eval_c);
  eval->add_option("--seed", eval_seed, "seed whose split and candidates to use")->required();
  eval->add_option("--checkpoint", checkpoint, "checkpoint stem (default: output_dir/checkpoints/seed<N>)");

  auto* sweep = app.add_subcommand("sweep", "train and evaluate over the shift ratios");
  add_common(sweep, sweep_c);

  auto* abl = app.add_subcommand("ablate", "train and evaluate each ablation variant");
  add_common(abl, abl_c);
  abl->add_option("--variants", variant_names_in, "variants to run (default: the config's list)");

  auto* replay = app.add_subcommand("replay-llm", "rerun discovery from a recorded model log");
  add_common(replay, replay_c);
  replay->add_option("--log", log_path, "replay log (default: output_dir/confounders/llm_replay.jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (prep->parsed()) {
      const auto cfg = prepare_data(resolve(prep_c), synthetic);
      std::printf("prepared %s (config_hash=%s)\n", layout(cfg).root.string().c_str(), config_hash(cfg).c_str());
    } else if (disc->parsed()) {
      const auto cfg = resolve(disc_c);
      auto llm = make_llm(cfg, mock);
      auto encoder = make_encoder(cfg);
      const auto a = discover_confounders(cfg, *llm, *encoder);
      print_pool("source", a.source);
      print_pool("target", a.target);
      print_pool("source (direct)", a.source_direct);
      print_pool("target (direct)", a.target_direct);
    } else if (train->parsed()) {
      const auto cfg = resolve(train_c);
      auto encoder = make_encoder(cfg);
      print_rows(train_all(cfg, *encoder, progress(train_c)));
    } else if (eval->parsed()) {
      const auto cfg = resolve(eval_c);
      auto encoder = make_encoder(cfg);
      const auto stem = checkpoint.empty() ? layout(cfg).checkpoint(eval_seed) : std::filesystem::path(checkpoint);
      print_rows({evaluate_checkpoint(cfg, *encoder, eval_seed, stem)});
    } else if (sweep->parsed()) {
      const auto cfg = resolve(sweep_c);
      auto encoder = make_encoder(cfg);
      const auto rows = sweep_all(cfg, *encoder, progress(sweep_c));
      print_rows(mean_by_group(rows));
    } else if (abl->parsed()) {
      const auto cfg = resolve(abl_c);
      std::vector<Variant> variants = cfg.ablation_variants;
      if (!variant_names_in.empty()) {
        variants.clear();
        for (const auto& n : variant_names_in) variants.push_back(variant_from_string(n));
      }
      auto encoder = make_encoder(cfg);
      print_rows(mean_by_group(ablate_all(cfg, variants, *encoder, progress(abl_c))));
    } else if (replay->parsed()) {
      const auto cfg = resolve(replay_c);
      auto encoder = make_encoder(cfg);
      const auto log = log_path.empty() ? layout(cfg).replay_log() : std::filesystem::path(log_path);
      const bool same = replay_discovery(cfg, log, *encoder);
      std::printf("replayed pools %s the recorded pools\n", same ? "match" : "differ from");
      return same ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
