#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cicdor/pipeline/checkpoint.hpp"
#include "cicdor/pipeline/config.hpp"
#include "cicdor/pipeline/experiment.hpp"
#include "cicdor/pipeline/metrics.hpp"
#include "cicdor/synthetic/cross_domain.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace cicdor;
using namespace cicdor::pipeline;

// ---- metrics ----

TEST(Metrics, ClosedFormRanks) {
  EXPECT_DOUBLE_EQ(metrics_at_rank(1).ndcg, 1.0);
  EXPECT_DOUBLE_EQ(metrics_at_rank(1).hr, 1.0);
  EXPECT_DOUBLE_EQ(metrics_at_rank(3).ndcg, 0.5);
  EXPECT_DOUBLE_EQ(metrics_at_rank(10).hr, 1.0);
  EXPECT_DOUBLE_EQ(metrics_at_rank(11).hr, 0.0);
  EXPECT_DOUBLE_EQ(metrics_at_rank(11).ndcg, 0.0);
  EXPECT_THROW(metrics_at_rank(0), std::invalid_argument);
}

TEST(Metrics, TiesGoToTheSmallerItemId) {
  const std::vector<Index> items = {3, 9, 1};
  const std::vector<double> scores = {0.5, 0.5, 0.5};
  EXPECT_EQ(rank_of_positive(5, 0.5, items, scores), 3);
  EXPECT_EQ(rank_of_positive(2, 0.5, items, scores), 2);
  EXPECT_EQ(rank_of_positive(0, 0.5, items, scores), 1);
}

TEST(Metrics, MatchesSortAndScanOracle) {
  numerics::Rng rng(11);
  std::vector<int> ranks;
  double hr = 0.0, ndcg = 0.0;
  for (int t = 0; t < 300; ++t) {
    std::vector<Index> items;
    std::vector<double> scores;
    std::vector<std::pair<double, int>> table;
    const auto positive = static_cast<int>(rng.index(200));
    const double pos_score = std::floor(rng.uniform(0, 8));
    table.emplace_back(pos_score, positive);
    while (items.size() < 99) {
      const auto id = static_cast<int>(rng.index(200));
      if (id == positive || std::find(items.begin(), items.end(), id) != items.end()) continue;
      items.push_back(id);
      scores.push_back(std::floor(rng.uniform(0, 8)) + (t % 2 ? rng.uniform() : 0.0));
      table.emplace_back(scores.back(), id);
    }
    const auto o = oracle::sort_and_scan(positive, table);
    const int r = rank_of_positive(positive, pos_score, items, scores);
    const auto m = metrics_at_rank(r);
    EXPECT_LT(std::abs(m.hr - o.hr), 1e-12);
    EXPECT_LT(std::abs(m.ndcg - o.ndcg), 1e-12);
    ranks.push_back(r);
    hr += o.hr;
    ndcg += o.ndcg;
  }
  const auto s = summarize(ranks);
  EXPECT_EQ(s.samples, 300u);
  EXPECT_LT(std::abs(s.hr_at_10 - hr / 300), 1e-12);
  EXPECT_LT(std::abs(s.ndcg_at_10 - ndcg / 300), 1e-12);
}

TEST(Metrics, EmptySummaryIsZero) {
  const auto s = summarize({});
  EXPECT_EQ(s.samples, 0u);
  EXPECT_EQ(s.hr_at_10, 0.0);
}

// ---- config ----

TEST(Config, DefaultsFollowTheReferenceSetup) {
  const RunConfig c;
  EXPECT_EQ(c.k, 64);
  EXPECT_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.batch_size, 256);
  EXPECT_EQ(c.confounders_j, 10);
  EXPECT_EQ(c.tau_max, 3);
  EXPECT_EQ(c.loss.beta1, 1.0);
  EXPECT_EQ(c.loss.beta2, 0.5);
  EXPECT_EQ(c.loss.beta3, 1.0);
  EXPECT_EQ(c.loss.beta4, 1e-5);
  EXPECT_EQ(c.loss.gamma, 0.5);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.sweep_ratios, (std::vector<double>{0.4, 0.6, 0.8, 1.0}));
  EXPECT_EQ(c.ablation_variants.size(), 6u);
}

TEST(Config, JsonRoundTripKeepsEveryFieldAndHash) {
  RunConfig c;
  c.k = 16;
  c.learning_rate = 5e-3;
  c.seeds = {7, 8};
  c.split.setting = data::SplitSetting::RegionShift;
  c.split.region = "west";
  c.variant = Variant::WithoutSharedLevel;
  c.llm.model = "some-model";
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.k = 32;
  EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Config, VariantListRoundTrips) {
  RunConfig c;
  c.ablation_variants = {Variant::WithoutConfounder, Variant::Full, Variant::DirectLlm};
  for (const Variant v : all_variants()) {
    c.variant = v;
    const auto back = config_from_json(to_json(c));
    EXPECT_EQ(back.variant, v);
    EXPECT_EQ(back.ablation_variants, c.ablation_variants);
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
}

TEST(Config, RejectsUnknownKeysAndVariants) {
  auto j = to_json(RunConfig{});
  j["no_such_key"] = 1;
  EXPECT_THROW(config_from_json(j), ConfigError);
  EXPECT_THROW(variant_from_string("w/o everything"), ConfigError);
  auto k = to_json(RunConfig{});
  k["ablation_variants"] = {"full", "bogus"};
  EXPECT_THROW(config_from_json(k), ConfigError);
  auto bad = to_json(RunConfig{});
  bad["learning_rate"] = -1.0;
  EXPECT_THROW(config_from_json(bad), ConfigError);
}

TEST(Config, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "cicdor_config_test.json";
  RunConfig c;
  c.epochs_phase1 = 3;
  save_config(path, c);
  EXPECT_EQ(to_json(load_config(path)), to_json(c));
  std::filesystem::remove(path);
}

// ---- checkpoints ----

TEST(Checkpoint, BinaryRoundTripIsExact) {
  numerics::Rng rng(3);
  predict::PredictorShape shape{4, 8, 4, 2};
  const auto params = ModelParams::init(shape, 5, rng);
  Checkpoint ck = snapshot(params.named());
  ck.meta["config_hash"] = "abc";
  const auto stem = std::filesystem::temp_directory_path() / "cicdor_ckpt_test";
  save_checkpoint(stem, ck);
  const auto back = load_checkpoint(stem);
  ASSERT_EQ(back.tensors.size(), ck.tensors.size());
  for (std::size_t i = 0; i < ck.tensors.size(); ++i) {
    EXPECT_EQ(back.tensors[i].first, ck.tensors[i].first);
    EXPECT_TRUE(back.tensors[i].second == ck.tensors[i].second) << ck.tensors[i].first;
  }
  EXPECT_EQ(back.meta, ck.meta);

  numerics::Rng other(4);
  auto fresh = ModelParams::init(shape, 5, other);
  auto named = fresh.named();
  restore(back, named);
  EXPECT_TRUE(fresh.dag_spe.a.value() == params.dag_spe.a.value());

  std::fstream f(stem.string() + ".bin", std::ios::in | std::ios::out | std::ios::binary);
  f.write("XXXX", 4);
  f.close();
  EXPECT_THROW(load_checkpoint(stem), CheckpointError);
  std::filesystem::remove(stem.string() + ".bin");
  std::filesystem::remove(stem.string() + ".json");
}

TEST(Checkpoint, RestoreRejectsShapeMismatch) {
  numerics::Rng rng(3);
  const auto small = ModelParams::init({4, 8, 4, 2}, 5, rng);
  auto big = ModelParams::init({4, 8, 4, 2}, 6, rng);
  auto named = big.named();
  EXPECT_THROW(restore(snapshot(small.named()), named), CheckpointError);
}

// ---- switches ----

TEST(Switches, PhaseOneIsRawForEveryVariant) {
  for (const Variant v : all_variants()) {
    const auto s = phase_switches(v, 1);
    EXPECT_FALSE(s.invariant_specific || s.invariant_shared || s.causal_specific || s.causal_shared);
  }
}

TEST(Switches, PhaseTwoFollowsTheVariant) {
  const auto full = phase_switches(Variant::Full, 2);
  EXPECT_TRUE(full.invariant_specific && full.invariant_shared && full.causal_specific && full.causal_shared);
  EXPECT_TRUE(full.confounders);
  const auto dual = phase_switches(Variant::WithoutDualLevel, 2);
  EXPECT_FALSE(dual.invariant_specific || dual.invariant_shared || dual.causal_specific || dual.causal_shared);
  const auto spe = phase_switches(Variant::WithoutSpecificLevel, 2);
  EXPECT_FALSE(spe.invariant_specific || spe.causal_specific);
  EXPECT_TRUE(spe.invariant_shared && spe.causal_shared);
  const auto sha = phase_switches(Variant::WithoutSharedLevel, 2);
  EXPECT_TRUE(sha.invariant_specific && sha.causal_specific);
  EXPECT_FALSE(sha.invariant_shared || sha.causal_shared);
  EXPECT_FALSE(phase_switches(Variant::WithoutConfounder, 2).confounders);
  EXPECT_TRUE(phase_switches(Variant::DirectLlm, 2).confounders);
}

// ---- training and evaluation on a small synthetic pair ----

struct Fixture {
  data::CorpusPair corpora;
  representation::MockTextEncoder encoder{0};
  ConfounderSubspaces subspaces;
  RunConfig cfg;

  Fixture() : corpora(make()) {
    cfg.k = 4;
    cfg.predictor = {4, 8, 4, 2};
    cfg.batch_size = 64;
    cfg.learning_rate = 5e-3;
    cfg.epochs_phase1 = 2;
    cfg.epochs_phase2 = 2;
    cfg.seeds = {1};
    cfg.acyclicity.max_escalations = 0;
    numerics::Rng rng(5);
    subspaces.source = testutil::random_matrix(rng, 3, 4);
    subspaces.target = testutil::random_matrix(rng, 3, 4);
  }

  static data::CorpusPair make() {
    synthetic::CrossDomainOptions o;
    o.users = 40;
    o.items_source = 200;
    o.items_target = 200;
    o.min_degree = 6;
    o.max_degree = 12;
    const auto d = synthetic::cross_domain_benchmark(9, o);
    return data::make_corpus_pair(d.source, d.target);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

TEST(Training, PhaseOneLeavesTheDagsAtTheirInitialValues) {
  auto& fx = fixture();
  const auto split = make_target_split(fx.cfg, fx.corpora.target, 1.0, 1);
  const auto setup = prepare_seed(fx.cfg, fx.corpora, fx.encoder, fx.subspaces, split, 1);
  numerics::Rng rng(1);
  auto params = ModelParams::init(fx.cfg.shape(), fx.corpora.target.num_users(), rng);
  const Matrix spe0 = params.dag_spe.a.value(), sha0 = params.dag_sha.a.value();
  const auto report = train_two_phase(params, setup.training, fx.cfg, 1);
  bool found = false;
  for (const auto& [name, m] : report.phase1.tensors) {
    if (name == "dag_spe") EXPECT_TRUE(m == spe0);
    if (name == "dag_sha") EXPECT_TRUE(m == sha0);
    found |= name == "dag_spe";
  }
  EXPECT_TRUE(found);
  EXPECT_FALSE(params.dag_spe.a.value() == spe0);
  EXPECT_EQ(report.epoch_loss.size(), 4u);
}

TEST(Training, InactiveLevelKeepsItsDag) {
  auto& fx = fixture();
  RunConfig c = fx.cfg;
  c.variant = Variant::WithoutSharedLevel;
  const auto split = make_target_split(c, fx.corpora.target, 1.0, 1);
  const auto setup = prepare_seed(c, fx.corpora, fx.encoder, fx.subspaces, split, 1);
  numerics::Rng rng(1);
  auto params = ModelParams::init(c.shape(), fx.corpora.target.num_users(), rng);
  const Matrix sha0 = params.dag_sha.a.value();
  train_two_phase(params, setup.training, c, 1);
  EXPECT_TRUE(params.dag_sha.a.value() == sha0);
  EXPECT_EQ(frozen_parameters(phase_switches(Variant::WithoutSharedLevel, 2)),
            std::vector<std::string>{"dag_sha"});
}

TEST(Training, SameSeedGivesTheSameTrajectory) {
  auto& fx = fixture();
  const auto a = run_seed(fx.cfg, fx.corpora, fx.encoder, fx.subspaces, 1.0, 2);
  const auto b = run_seed(fx.cfg, fx.corpora, fx.encoder, fx.subspaces, 1.0, 2);
  EXPECT_EQ(a.report.epoch_loss, b.report.epoch_loss);
  EXPECT_EQ(a.metrics.hr_at_10, b.metrics.hr_at_10);
  EXPECT_EQ(a.metrics.ndcg_at_10, b.metrics.ndcg_at_10);
}

TEST(Training, NonFiniteLossAbortsWithLastFiniteParameters) {
  auto& fx = fixture();
  const auto split = make_target_split(fx.cfg, fx.corpora.target, 1.0, 1);
  auto setup = prepare_seed(fx.cfg, fx.corpora, fx.encoder, fx.subspaces, split, 1);
  setup.training.target.text.users(0, 0) = std::numeric_limits<double>::quiet_NaN();
  numerics::Rng rng(1);
  auto params = ModelParams::init(fx.cfg.shape(), fx.corpora.target.num_users(), rng);
  const auto initial = snapshot(params.named());
  try {
    train_two_phase(params, setup.training, fx.cfg, 1);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.epoch(), 1);
    ASSERT_EQ(e.last_finite().tensors.size(), initial.tensors.size());
    for (std::size_t i = 0; i < initial.tensors.size(); ++i)
      EXPECT_TRUE(e.last_finite().tensors[i].second == initial.tensors[i].second);
  }
}

TEST(Evaluation, IgnoresCandidateOrderAndRepeatsExactly) {
  auto& fx = fixture();
  const auto split = make_target_split(fx.cfg, fx.corpora.target, 1.0, 1);
  const auto setup = prepare_seed(fx.cfg, fx.corpora, fx.encoder, fx.subspaces, split, 1);
  numerics::Rng rng(1);
  auto params = ModelParams::init(fx.cfg.shape(), fx.corpora.target.num_users(), rng);
  ASSERT_FALSE(setup.candidates.empty());
  for (const auto& s : setup.candidates) EXPECT_EQ(s.negatives.size(), 99u);
  const auto ranks = rank_candidates(params, setup.training, fx.cfg, setup.candidates);
  auto shuffled = setup.candidates;
  numerics::Rng r2(2);
  for (auto& s : shuffled) r2.shuffle(s.negatives.begin(), s.negatives.end());
  EXPECT_EQ(rank_candidates(params, setup.training, fx.cfg, shuffled), ranks);

  auto csv = [&] {
    const auto m = evaluate(params, setup.training, fx.cfg, setup.candidates);
    std::ostringstream out;
    write_metrics_csv(out, config_hash(fx.cfg), {{"user_degree_shift", 1.0, 1, m.hr_at_10, m.ndcg_at_10}});
    return out.str();
  };
  EXPECT_EQ(csv(), csv());
}

TEST(Evaluation, WithoutConfounderMatchesAZeroConfounderFullModel) {
  auto& fx = fixture();
  RunConfig c = fx.cfg;
  ConfounderSubspaces zero{Matrix::Zero(3, 4), Matrix::Zero(3, 4)};
  const auto split = make_target_split(c, fx.corpora.target, 1.0, 1);
  const auto setup = prepare_seed(c, fx.corpora, fx.encoder, zero, split, 1);
  numerics::Rng rng(1);
  auto params = ModelParams::init(c.shape(), fx.corpora.target.num_users(), rng);
  Matrix w = params.pred_t.fc.w.value();
  w.middleRows(2 * c.k, c.k).setZero();
  params.pred_t.fc.w = ad::Var::parameter(w);
  c.variant = Variant::Full;
  const auto full = rank_candidates(params, setup.training, c, setup.candidates);
  c.variant = Variant::WithoutConfounder;
  EXPECT_EQ(rank_candidates(params, setup.training, c, setup.candidates), full);
}

TEST(Evaluation, AblateAndSweepProduceOneRowPerRun) {
  auto& fx = fixture();
  RunConfig c = fx.cfg;
  c.epochs_phase1 = 1;
  c.epochs_phase2 = 0;
  const auto rows = ablate(c, Variant::WithoutConfounder, fx.corpora, fx.encoder, fx.subspaces);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].setting, "user_degree_shift:w/o confounder");
  const auto sweep = shift_sweep(c, fx.corpora, fx.encoder, fx.subspaces, {0.4, 1.0});
  ASSERT_EQ(sweep.size(), 2u);
  EXPECT_EQ(sweep[0].ratio, 0.4);
  EXPECT_EQ(sweep[1].ratio, 1.0);
}

// ---- csv ----

TEST(Csv, HeaderHashAndFixedPrecision) {
  std::ostringstream out;
  write_metrics_csv(out, "0123456789abcdef",
                    {{"iid", 0.4, 1, 0.5, 0.25}, {"iid", 0.4, 2, 0.25, 0.125}, {"iid", 1.0, 1, 1.0, 1.0}});
  EXPECT_EQ(out.str(),
            "# config_hash=0123456789abcdef\n"
            "setting,ratio,seed,hr10,ndcg10\n"
            "iid,0.40,1,0.500000,0.250000\n"
            "iid,0.40,2,0.250000,0.125000\n"
            "iid,1.00,1,1.000000,1.000000\n");
  const auto mean = mean_by_group({{"iid", 0.4, 1, 0.5, 0.25}, {"iid", 0.4, 2, 0.25, 0.125}, {"iid", 1.0, 1, 1.0, 1.0}});
  ASSERT_EQ(mean.size(), 2u);
  EXPECT_DOUBLE_EQ(mean[0].hr10, 0.375);
}

}  // namespace
