#include "cicdor/representation/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cicdor::representation {

ad::Var build_attribute_embeddings(const ad::Var& w_att, std::span<const Index> users) {
  for (const Index u : users) {
    if (u < 0 || u >= w_att.cols()) {
      throw std::out_of_range("user index " + std::to_string(u) + " outside [0, " +
                              std::to_string(w_att.cols()) + ")");
    }
  }
  return ad::gather_rows(ad::transpose(w_att), users);
}

ad::Var attribute_table(const ad::Var& w_att) { return ad::transpose(w_att); }

ad::Var init_attribute_matrix(Index k, Index m, numerics::Rng& rng) {
  const double sd = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix w(k, m);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) w(i, j) = sd * rng.normal();
  return ad::Var::parameter(std::move(w));
}

namespace {

bool skipped(const data::Event& e, std::span<const data::Interaction> held_out) {
  if (!e.review || e.review->empty()) return true;
  return std::binary_search(held_out.begin(), held_out.end(), data::Interaction{e.user, e.item});
}

}  // namespace

std::vector<std::string> user_documents(const data::InteractionCorpus& corpus,
                                        std::span<const data::Interaction> held_out) {
  std::vector<std::string> docs(static_cast<std::size_t>(corpus.num_users()));
  for (const auto& e : corpus.events()) {
    if (skipped(e, held_out)) continue;
    auto& d = docs[static_cast<std::size_t>(e.user)];
    if (!d.empty()) d.push_back('\n');
    d += *e.review;
  }
  return docs;
}

std::vector<std::string> item_documents(const data::InteractionCorpus& corpus,
                                        std::span<const std::string> item_details,
                                        std::span<const data::Interaction> held_out) {
  if (!item_details.empty() && item_details.size() != static_cast<std::size_t>(corpus.num_items())) {
    throw std::invalid_argument("item details must cover every item");
  }
  std::vector<std::string> docs(static_cast<std::size_t>(corpus.num_items()));
  if (!item_details.empty()) docs.assign(item_details.begin(), item_details.end());
  for (const auto& e : corpus.events()) {
    if (skipped(e, held_out)) continue;
    auto& d = docs[static_cast<std::size_t>(e.item)];
    if (!d.empty()) d.push_back('\n');
    d += *e.review;
  }
  return docs;
}

TextEmbeddings encode_corpus(const data::InteractionCorpus& corpus, TextEncoderPort& encoder,
                             std::span<const std::string> item_details,
                             std::span<const data::Interaction> held_out) {
  std::vector<std::string> user_ids;
  for (const auto& u : corpus.users()) user_ids.push_back(u.id);
  const auto udocs = user_documents(corpus, held_out);
  const auto idocs = item_documents(corpus, item_details, held_out);
  return {encode_documents(encoder, user_ids, udocs), encode_documents(encoder, corpus.items(), idocs)};
}

InitialProjection InitialProjection::init(Index k, numerics::Rng& rng) {
  InitialProjection p;
  p.user = nn::Mlp::init({k + kTextDim, k, k}, rng);
  p.item = nn::Mlp::init({kTextDim, k, k}, rng);
  return p;
}

void InitialProjection::collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const {
  user.collect(prefix + ".user_proj", out);
  item.collect(prefix + ".item_proj", out);
}

InitialEmbeddings build_initial_embeddings(const ad::Var& e_att, const TextEmbeddings& text,
                                           const InitialProjection& proj) {
  if (e_att.rows() != text.users.rows()) throw std::invalid_argument("attribute and text rows differ");
  const ad::Var parts[] = {e_att, ad::Var::constant(text.users)};
  return {proj.user(ad::concat_cols(parts)), proj.item(ad::Var::constant(text.items))};
}

}  // namespace cicdor::representation
