#pragma once

#include <span>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/numerics/layers.hpp"
#include "cicdor/representation/text_encoder.hpp"

namespace cicdor::representation {

/// Rows of W_attᵀ for the given users: row i is column users[i] of W_att (k x m).
ad::Var build_attribute_embeddings(const ad::Var& w_att, std::span<const Index> users);

/// Whole attribute table, m x k.
ad::Var attribute_table(const ad::Var& w_att);

/// W_att with i.i.d. N(0, 1/k) entries.
ad::Var init_attribute_matrix(Index k, Index m, numerics::Rng& rng);

/// Per user, every review text joined by newlines in event order. Events on
/// pairs listed in `held_out` (sorted) are skipped.
std::vector<std::string> user_documents(const data::InteractionCorpus& corpus,
                                        std::span<const data::Interaction> held_out = {});

/// Per item, its details (when given, indexed like corpus.items()) followed by
/// every review of it.
std::vector<std::string> item_documents(const data::InteractionCorpus& corpus,
                                        std::span<const std::string> item_details = {},
                                        std::span<const data::Interaction> held_out = {});

/// Fixed text embeddings of one domain.
struct TextEmbeddings {
  Matrix users;  // m x 384
  Matrix items;  // n x 384
};

TextEmbeddings encode_corpus(const data::InteractionCorpus& corpus, TextEncoderPort& encoder,
                             std::span<const std::string> item_details = {},
                             std::span<const data::Interaction> held_out = {});

/// Two-layer projections: (k + 384) -> k -> k for users, 384 -> k -> k for items.
struct InitialProjection {
  nn::Mlp user;
  nn::Mlp item;

  static InitialProjection init(Index k, numerics::Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const;
};

struct InitialEmbeddings {
  ad::Var users;  // E_ui, m x k
  ad::Var items;  // E_vi, n x k
};

/// E_ui = proj_u(E_att ∥ E_ut), E_vi = proj_v(E_vt).
InitialEmbeddings build_initial_embeddings(const ad::Var& e_att, const TextEmbeddings& text,
                                           const InitialProjection& proj);

}  // namespace cicdor::representation
