#include <cmath>

#include <gtest/gtest.h>

#include "cicdor/representation/disentangle.hpp"
#include "cicdor/representation/embeddings.hpp"
#include "cicdor/representation/gcn.hpp"
#include "cicdor/representation/text_encoder.hpp"
#include "test_util.hpp"

using namespace cicdor;
using namespace cicdor::representation;
using testutil::contract;
using testutil::random_matrix;
using testutil::worst_gradient_error;

TEST(TextEncoder, MockIsDeterministicAndFixedWidth) {
  MockTextEncoder enc(3);
  const std::vector<std::string> docs{"Fast shipping, great book", "", "fast SHIPPING great book!"};
  const Matrix a = enc.encode(docs);
  ASSERT_EQ(a.cols(), kTextDim);
  ASSERT_EQ(a.rows(), 3);
  EXPECT_TRUE(a.row(1).isZero());
  EXPECT_EQ(a.row(0), a.row(2));  // same token multiset
  MockTextEncoder again(3);
  EXPECT_EQ(again.encode(docs), a);
  MockTextEncoder other(4);
  EXPECT_NE(other.encode(docs).row(0), a.row(0));
}

TEST(TextEncoder, FailureNamesDocument) {
  struct Flaky : TextEncoderPort {
    Matrix encode(std::span<const std::string> texts) override {
      for (const auto& t : texts)
        if (t == "boom") throw std::runtime_error("model crashed");
      return Matrix::Zero(static_cast<Index>(texts.size()), kTextDim);
    }
    std::string name() const override { return "flaky"; }
  } flaky;
  const std::vector<std::string> ids{"a", "b", "c"};
  const std::vector<std::string> docs{"ok", "boom", "ok"};
  try {
    encode_documents(flaky, ids, docs);
    FAIL();
  } catch (const TextEncoderError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(AttributeEmbeddings, OneHotLookup) {
  numerics::Rng rng(1);
  auto w = init_attribute_matrix(4, 6, rng);
  const std::vector<Index> users{2, 0, 5};
  const auto e = build_attribute_embeddings(w, users);
  for (std::size_t i = 0; i < users.size(); ++i) EXPECT_EQ(e.value().row(i).transpose(), w.value().col(users[i]));

  Matrix eye = Matrix::Zero(4, 6);
  eye.topLeftCorner(4, 4).setIdentity();
  const std::vector<Index> first{0};
  Matrix e0 = Matrix::Zero(1, 4);
  e0(0, 0) = 1.0;
  EXPECT_EQ(build_attribute_embeddings(ad::Var::constant(eye), first).value(), e0);

  const std::vector<Index> bad{6};
  EXPECT_THROW(build_attribute_embeddings(w, bad), std::out_of_range);
}

TEST(AttributeEmbeddings, GradientTouchesOnlyBatchColumns) {
  numerics::Rng rng(2);
  auto w = init_attribute_matrix(4, 6, rng);
  const std::vector<Index> users{1, 4};
  ad::backward(contract(build_attribute_embeddings(w, users), 9));
  const Matrix g = w.grad();
  for (Index c = 0; c < 6; ++c) {
    if (c == 1 || c == 4) {
      EXPECT_GT(g.col(c).norm(), 0.0);
    } else {
      EXPECT_TRUE(g.col(c).isZero());
    }
  }
  EXPECT_LT(worst_gradient_error([&] { return contract(build_attribute_embeddings(w, users), 9); }, {w}), 1e-6);
}

TEST(InitialEmbeddings, EmptyDocsFiniteAndIdenticalDocsIdenticalRows) {
  numerics::Rng rng(3);
  const Index k = 6;
  MockTextEncoder enc(1);
  const std::vector<std::string> udocs{"", "loves thrillers", "loves thrillers"};
  const std::vector<std::string> idocs{"a novel", ""};
  TextEmbeddings text{enc.encode(udocs), enc.encode(idocs)};
  const auto proj = InitialProjection::init(k, rng);
  // Same attribute row for users 1 and 2 so their inputs coincide.
  Matrix att = random_matrix(rng, 3, k);
  att.row(2) = att.row(1);
  const auto out = build_initial_embeddings(ad::Var::constant(att), text, proj);
  EXPECT_EQ(out.users.rows(), 3);
  EXPECT_EQ(out.users.cols(), k);
  EXPECT_TRUE(all_finite(out.users.value()));
  EXPECT_TRUE(all_finite(out.items.value()));
  EXPECT_TRUE(out.users.value().row(1).isApprox(out.users.value().row(2), 1e-14));
}

TEST(InitialEmbeddings, ProjectionGradientCheck) {
  numerics::Rng rng(4);
  const Index k = 4;
  TextEmbeddings text{random_matrix(rng, 3, kTextDim), random_matrix(rng, 2, kTextDim)};
  auto att = ad::Var::parameter(random_matrix(rng, 3, k));
  const auto proj = InitialProjection::init(k, rng);
  std::vector<nn::NamedParam> named;
  proj.collect("p", named);
  auto params = nn::vars_of(named);
  params.push_back(att);
  auto f = [&] {
    const auto e = build_initial_embeddings(att, text, proj);
    return contract(e.users, 1) + contract(e.items, 2);
  };
  EXPECT_LT(worst_gradient_error(f, params), 1e-4);
}

TEST(Gcn, NoEdgesIsIdentity) {
  numerics::Rng rng(5);
  const auto g = BipartiteGraph::build(3, 2, {});
  const Matrix u = random_matrix(rng, 3, 4);
  const Matrix v = random_matrix(rng, 2, 4);
  const auto out = gcn_propagate(g, ad::Var::constant(u), ad::Var::constant(v));
  EXPECT_TRUE(out.users.value().isApprox(u, 1e-15));
  EXPECT_TRUE(out.items.value().isApprox(v, 1e-15));
}

TEST(Gcn, SingleEdgeOneLayerHandOracle) {
  const std::vector<data::Interaction> edges{{0, 0}};
  const auto g = BipartiteGraph::build(1, 1, edges);
  Matrix u(1, 2), v(1, 2);
  u << 1.0, 2.0;
  v << 3.0, -1.0;
  const auto out = gcn_propagate(g, ad::Var::constant(u), ad::Var::constant(v), 1);
  // Degrees are both 1: layer 1 swaps the two rows; readout averages layers 0 and 1.
  const Matrix expect_u = (u + v / std::sqrt(1.0 * 1.0)) / 2.0;
  const Matrix expect_v = (v + u) / 2.0;
  EXPECT_TRUE(out.users.value().isApprox(expect_u, 1e-15));
  EXPECT_TRUE(out.items.value().isApprox(expect_v, 1e-15));
}

TEST(Gcn, TwoLayerMatchesDenseOracle) {
  numerics::Rng rng(6);
  const Index m = 5, n = 4;
  std::vector<data::Interaction> edges{{0, 0}, {0, 1}, {1, 1}, {2, 3}, {3, 0}, {3, 1}, {3, 2}};
  const Matrix u = random_matrix(rng, m, 3);
  const Matrix v = random_matrix(rng, n, 3);
  // Dense reference: user 4 is isolated.
  Matrix adj = Matrix::Zero(m + n, m + n);
  for (const auto& e : edges) adj(e.user, m + e.item) = adj(m + e.item, e.user) = 1.0;
  Matrix p = Matrix::Zero(m + n, m + n);
  for (Index i = 0; i < m + n; ++i) {
    const double di = adj.row(i).sum();
    if (di == 0) p(i, i) = 1;
    for (Index j = 0; j < m + n; ++j)
      if (adj(i, j) != 0) p(i, j) = 1.0 / std::sqrt(di * adj.row(j).sum());
  }
  Matrix h0(m + n, 3);
  h0 << u, v;
  const Matrix h1 = p * h0;
  const Matrix h2 = p * h1;
  const Matrix expect = (h0 + h1 + h2) / 3.0;

  const auto out = gcn_propagate(BipartiteGraph::build(m, n, edges), ad::Var::constant(u), ad::Var::constant(v));
  EXPECT_TRUE(out.users.value().isApprox(expect.topRows(m), 1e-14));
  EXPECT_TRUE(out.items.value().isApprox(expect.bottomRows(n), 1e-14));
  EXPECT_TRUE(out.users.value().row(4).isApprox(u.row(4), 1e-15));
}

TEST(Gcn, PermutationEquivariant) {
  numerics::Rng rng(7);
  const Index m = 4, n = 3;
  std::vector<data::Interaction> edges{{0, 0}, {1, 0}, {1, 2}, {2, 1}, {3, 2}};
  const Matrix u = random_matrix(rng, m, 2);
  const Matrix v = random_matrix(rng, n, 2);
  const std::vector<Index> up{2, 0, 3, 1};  // new index of user i
  const std::vector<Index> vp{1, 2, 0};
  std::vector<data::Interaction> pe;
  for (const auto& e : edges) pe.push_back({up[e.user], vp[e.item]});
  Matrix pu(m, 2), pv(n, 2);
  for (Index i = 0; i < m; ++i) pu.row(up[i]) = u.row(i);
  for (Index i = 0; i < n; ++i) pv.row(vp[i]) = v.row(i);

  const auto a = gcn_propagate(BipartiteGraph::build(m, n, edges), ad::Var::constant(u), ad::Var::constant(v));
  const auto b = gcn_propagate(BipartiteGraph::build(m, n, pe), ad::Var::constant(pu), ad::Var::constant(pv));
  for (Index i = 0; i < m; ++i) EXPECT_TRUE(b.users.value().row(up[i]).isApprox(a.users.value().row(i), 1e-14));
  for (Index i = 0; i < n; ++i) EXPECT_TRUE(b.items.value().row(vp[i]).isApprox(a.items.value().row(i), 1e-14));
}

TEST(Disentangle, ZeroInputsGiveBiasComposition) {
  numerics::Rng rng(8);
  const Index k = 4;
  const auto enc = Disentangler::init(k, rng);
  const auto z = ad::Var::constant(Matrix::Zero(2, k));
  const auto out = disentangle(z, z, enc);
  const auto& l0 = enc.shared.layers[0];
  const auto& l1 = enc.shared.layers[1];
  const Matrix expect = (l0.b.value().cwiseMax(0.0) * l1.w.value() + l1.b.value()).array().tanh().matrix();
  EXPECT_TRUE(out.sha_s.value().row(0).isApprox(expect, 1e-15));
  EXPECT_EQ(out.sha_s.value(), out.sha_t.value());
}

TEST(Disentangle, SharedEncoderIsOrderInvariant) {
  numerics::Rng rng(9);
  const Index k = 4;
  const auto enc = Disentangler::init(k, rng);
  const auto a = ad::Var::constant(random_matrix(rng, 3, k));
  const auto b = ad::Var::constant(random_matrix(rng, 3, k));
  const auto ab = disentangle(a, b, enc);
  const auto ba = disentangle(b, a, enc);
  EXPECT_EQ(ab.sha_s.value(), ba.sha_t.value());
  EXPECT_EQ(ab.sha_t.value(), ba.sha_s.value());
}

TEST(DomainLosses, MaximalConfusionIsLn2) {
  const Index k = 4;
  Discriminator disc{nn::Mlp{{nn::Linear::zeros(k, 2), nn::Linear::zeros(2, 1)}}};
  numerics::Rng rng(10);
  DisentangledPrefs p{ad::Var::constant(random_matrix(rng, 3, k)), ad::Var::constant(random_matrix(rng, 3, k)),
                      ad::Var::constant(random_matrix(rng, 3, k)), ad::Var::constant(random_matrix(rng, 3, k))};
  const auto l = domain_losses(p, disc, 0.5);
  for (const auto* v : {&l.sha_s, &l.sha_t, &l.spe_s, &l.spe_t}) EXPECT_NEAR(v->item(), std::log(2.0), 1e-15);
  EXPECT_NEAR(l.total.item(), 2 * std::log(2.0), 1e-15);
  EXPECT_FALSE(l.clamped);
}

TEST(DomainLosses, PerfectDiscriminatorHitsClampFloor) {
  // Output sign follows the first input coordinate with a huge gain.
  const Index k = 2;
  nn::Linear l0 = nn::Linear::zeros(k, 1);
  l0.w.mutable_value()(0, 0) = 1.0;
  nn::Linear l1 = nn::Linear::zeros(1, 1);
  l1.w.mutable_value()(0, 0) = 1e4;
  Discriminator disc{nn::Mlp{{l0, l1}}};
  Matrix src = Matrix::Zero(2, k);  // relu(0) = 0 -> sigmoid(0); push source negative via bias
  Matrix tgt = Matrix::Constant(2, k, 1.0);
  l1.b.mutable_value()(0, 0) = -5e3;  // source -> sigmoid(-5e3), target -> sigmoid(5e3)
  DisentangledPrefs p{ad::Var::constant(src), ad::Var::constant(tgt), ad::Var::constant(src), ad::Var::constant(tgt)};
  const auto l = domain_losses(p, disc, 0.5);
  EXPECT_TRUE(l.clamped);
  EXPECT_NEAR(l.spe_s.item(), -std::log(1 - kProbClamp), 1e-12);
  EXPECT_NEAR(l.spe_t.item(), -std::log(1 - kProbClamp), 1e-12);
  EXPECT_GE(l.sha_s.item(), 0.0);
}

TEST(DomainLosses, GammaAlgebra) {
  numerics::Rng rng(11);
  const Index k = 4;
  const auto disc = Discriminator::init(k, rng);
  DisentangledPrefs p{ad::Var::constant(random_matrix(rng, 5, k)), ad::Var::constant(random_matrix(rng, 5, k)),
                      ad::Var::constant(random_matrix(rng, 5, k)), ad::Var::constant(random_matrix(rng, 5, k))};
  for (double g : {0.0, 0.3, 1.0}) {
    const auto l = domain_losses(p, disc, g);
    EXPECT_NEAR(l.total.item(), g * (l.sha_s.item() + l.spe_s.item()) + (1 - g) * (l.sha_t.item() + l.spe_t.item()),
                1e-14);
    for (const auto* v : {&l.sha_s, &l.sha_t, &l.spe_s, &l.spe_t}) EXPECT_GE(v->item(), 0.0);
  }
  EXPECT_THROW(domain_losses(p, disc, 1.5), std::invalid_argument);
}

TEST(DomainLosses, GrlReversesSharedEncoderGradientExactly) {
  numerics::Rng rng(12);
  const Index k = 4;
  const auto enc = Disentangler::init(k, rng);
  const auto disc = Discriminator::init(k, rng);
  const auto xs = ad::Var::constant(random_matrix(rng, 6, k));
  const auto xt = ad::Var::constant(random_matrix(rng, 6, k));
  std::vector<nn::NamedParam> named;
  enc.shared.collect("s", named);

  auto shared_grads = [&](double lambda) {
    for (auto& p : named) p.var.zero_grad();
    const auto prefs = disentangle(xs, xt, enc);
    const auto l = domain_losses(prefs, disc, 0.5, lambda);
    ad::backward(l.sha_s + l.sha_t);
    std::vector<Matrix> g;
    for (auto& p : named) g.push_back(p.var.grad());
    return g;
  };
  const auto reversed = shared_grads(1.0);
  const auto plain = shared_grads(-1.0);  // -(-1) = identity scaling: the path without reversal
  for (std::size_t i = 0; i < named.size(); ++i) EXPECT_EQ(reversed[i], (-plain[i]).eval());
}

TEST(DomainLosses, GradientCheckAllParameters) {
  numerics::Rng rng(13);
  const Index k = 4;
  const auto enc = Disentangler::init(k, rng);
  const auto disc = Discriminator::init(k, rng);
  const auto xs = ad::Var::constant(random_matrix(rng, 5, k));
  const auto xt = ad::Var::constant(random_matrix(rng, 5, k));
  std::vector<nn::NamedParam> named;
  disc.collect("d", named);
  enc.specific_source.collect("ss", named);
  enc.specific_target.collect("st", named);
  const auto params = nn::vars_of(named);
  // The GRL makes the total a saddle objective; check each term without it.
  auto f = [&] { return domain_losses(disentangle(xs, xt, enc), disc, 0.3).total; };
  EXPECT_LT(worst_gradient_error(f, params), 1e-4);

  std::vector<nn::NamedParam> shared;
  enc.shared.collect("sh", shared);
  auto g = [&] {
    const auto l = domain_losses(disentangle(xs, xt, enc), disc, 0.3, -1.0);
    return l.total;
  };
  EXPECT_LT(worst_gradient_error(g, nn::vars_of(shared)), 1e-4);
}
