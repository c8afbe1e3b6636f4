#include "cicdor/pipeline/model.hpp"

#include <array>

namespace cicdor::pipeline {

ModelParams ModelParams::init(const predict::PredictorShape& shape, Index num_users, numerics::Rng& rng) {
  const Index k = shape.k;
  ModelParams p;
  p.w_att_s = representation::init_attribute_matrix(k, num_users, rng);
  p.w_att_t = representation::init_attribute_matrix(k, num_users, rng);
  p.proj_s = representation::InitialProjection::init(k, rng);
  p.proj_t = representation::InitialProjection::init(k, rng);
  p.enc = representation::Disentangler::init(k, rng);
  p.disc = representation::Discriminator::init(k, rng);
  p.dag_spe = causal::AdjacencyDag::init(k, causal::DagLevel::Specific, rng);
  p.dag_sha = causal::AdjacencyDag::init(k, causal::DagLevel::Shared, rng);
  p.fuse_s = causal::FusionAttention::init(k, rng);
  p.fuse_t = causal::FusionAttention::init(k, rng);
  p.pred_s = predict::PredictorParams::init(shape, rng);
  p.pred_t = predict::PredictorParams::init(shape, rng);
  return p;
}

std::vector<nn::NamedParam> ModelParams::named() const {
  std::vector<nn::NamedParam> out;
  out.push_back({"w_att_s", w_att_s});
  out.push_back({"w_att_t", w_att_t});
  proj_s.collect("proj_s", out);
  proj_t.collect("proj_t", out);
  enc.collect("enc", out);
  disc.collect("disc", out);
  out.push_back({"dag_spe", dag_spe.a});
  out.push_back({"dag_sha", dag_sha.a});
  fuse_s.collect("fuse_s", out);
  fuse_t.collect("fuse_t", out);
  pred_s.collect("pred_s", out);
  pred_t.collect("pred_t", out);
  return out;
}

PathSwitches phase_switches(Variant v, int phase) {
  PathSwitches sw;
  sw.confounders = v != Variant::WithoutConfounder;
  if (phase < 2 || v == Variant::WithoutDualLevel) return sw;
  sw.invariant_specific = sw.causal_specific = v != Variant::WithoutSpecificLevel;
  sw.invariant_shared = sw.causal_shared = v != Variant::WithoutSharedLevel;
  return sw;
}

ForwardPass forward(const ModelParams& p, const DomainInputs& source, const DomainInputs& target,
                    const PathSwitches& sw, double gamma, double grl_lambda, int gcn_layers,
                    const causal::CausalLossWeights& cw) {
  const Index k = p.k();
  const ad::Var att_s = representation::attribute_table(p.w_att_s);
  const ad::Var att_t = representation::attribute_table(p.w_att_t);
  const auto init_s = representation::build_initial_embeddings(att_s, source.text, p.proj_s);
  const auto init_t = representation::build_initial_embeddings(att_t, target.text, p.proj_t);
  const auto g_s = representation::gcn_propagate(source.graph, init_s.users, init_s.items, gcn_layers);
  const auto g_t = representation::gcn_propagate(target.graph, init_t.users, init_t.items, gcn_layers);
  const auto prefs = representation::disentangle(g_s.users, g_t.users, p.enc);

  ForwardPass out;
  out.item_s = g_s.items;
  out.item_t = g_t.items;
  const auto dom = representation::domain_losses(prefs, p.disc, gamma, grl_lambda);
  out.domain = dom.total;
  out.domain_clamped = dom.clamped;

  // The SCM rows enter the causal loss as constants: the loss shapes the DAGs
  // only, otherwise shrinking every row to zero would satisfy it trivially.
  auto fixed = [](const ad::Var& x) { return ad::Var::constant(x.value()); };
  if (sw.causal_specific) {
    const ad::Var b = causal::scm_batch(fixed(att_t), fixed(prefs.spe_t));
    out.causal = causal::level_causal_loss(b, p.dag_spe.a, k, cw);
  }
  if (sw.causal_shared) {
    const std::array<ad::Var, 2> rows = {causal::scm_batch(fixed(att_s), fixed(prefs.sha_s)),
                                         causal::scm_batch(fixed(att_t), fixed(prefs.sha_t))};
    const ad::Var shared = causal::level_causal_loss(ad::concat_rows(rows), p.dag_sha.a, k, cw);
    out.causal = out.causal.defined() ? out.causal + shared : shared;
  }

  const ad::Var spe_t = sw.invariant_specific ? causal::infer_invariant(p.dag_spe, att_t) : prefs.spe_t;
  const ad::Var sha_t = sw.invariant_shared ? causal::infer_invariant(p.dag_sha, att_t) : prefs.sha_t;
  const ad::Var sha_s = sw.invariant_shared ? causal::infer_invariant(p.dag_sha, att_s) : prefs.sha_s;
  out.user_t = causal::fuse_attention(spe_t, sha_t, p.fuse_t).value;
  out.user_s = causal::fuse_attention(prefs.spe_s, sha_s, p.fuse_s).value;
  return out;
}

ad::Var score_pairs(const ad::Var& users, const ad::Var& items, std::span<const Index> user_rows,
                    std::span<const Index> item_rows, const Matrix& confounders, bool use_confounders,
                    const predict::PredictorParams& pred) {
  const ad::Var e_u = ad::gather_rows(users, user_rows);
  const ad::Var e_v = ad::gather_rows(items, item_rows);
  ad::Var c;
  if (use_confounders && confounders.rows() > 0) c = ad::Var::constant(confounders);
  return predict::predict_logit(predict::backdoor_input(e_u, e_v, c, pred), pred);
}

}  // namespace cicdor::pipeline
