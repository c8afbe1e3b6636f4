#include "cicdor/data/corpus.hpp"

#include <algorithm>
#include <set>

namespace cicdor::data {

RatingError::RatingError(std::size_t event_index, int rating)
    : DataError("event " + std::to_string(event_index) + ": rating " + std::to_string(rating) +
                " outside [1, 5]"),
      event_index_(event_index) {}

InteractionCorpus InteractionCorpus::build(std::string domain, std::span<const EventRecord> records,
                                           const std::vector<std::string>* user_ids) {
  InteractionCorpus c;
  c.domain_ = std::move(domain);

  std::set<std::string> user_set;
  std::set<std::string> item_set;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.rating < 1 || r.rating > 5) throw RatingError(i, r.rating);
    user_set.insert(r.user);
    item_set.insert(r.item);
  }

  std::vector<std::string> ordered_users =
      user_ids ? *user_ids : std::vector<std::string>(user_set.begin(), user_set.end());
  for (std::size_t i = 0; i < ordered_users.size(); ++i) {
    c.user_lookup_.emplace(ordered_users[i], static_cast<Index>(i));
    c.users_.push_back({ordered_users[i], std::nullopt});
  }
  c.items_.assign(item_set.begin(), item_set.end());
  for (std::size_t i = 0; i < c.items_.size(); ++i) c.item_lookup_.emplace(c.items_[i], static_cast<Index>(i));

  c.degree_.assign(c.users_.size(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto u = c.user_lookup_.find(r.user);
    if (u == c.user_lookup_.end()) {
      throw DataError("event " + std::to_string(i) + ": unknown user '" + r.user + "'");
    }
    auto& user = c.users_[static_cast<std::size_t>(u->second)];
    if (r.region) {
      if (user.region && *user.region != *r.region) {
        throw DataError("user '" + r.user + "' has conflicting regions");
      }
      user.region = r.region;
    }
    c.events_.push_back({u->second, c.item_lookup_.at(r.item), r.rating, r.review});
    ++c.degree_[static_cast<std::size_t>(u->second)];
  }
  return c;
}

Index InteractionCorpus::user_index(const std::string& id) const {
  const auto it = user_lookup_.find(id);
  if (it == user_lookup_.end()) throw DataError("unknown user '" + id + "'");
  return it->second;
}

Index InteractionCorpus::item_index(const std::string& id) const {
  const auto it = item_lookup_.find(id);
  if (it == item_lookup_.end()) throw DataError("unknown item '" + id + "'");
  return it->second;
}

bool InteractionCorpus::has_region_metadata() const {
  return std::any_of(users_.begin(), users_.end(), [](const User& u) { return u.region.has_value(); });
}

std::vector<Index> InteractionCorpus::rated_items(Index user) const {
  std::vector<Index> out;
  for (const auto& e : events_) {
    if (e.user == user) out.push_back(e.item);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CorpusPair make_corpus_pair(std::span<const EventRecord> source, std::span<const EventRecord> target) {
  std::set<std::string> s_users;
  std::set<std::string> t_users;
  for (const auto& r : source) s_users.insert(r.user);
  for (const auto& r : target) t_users.insert(r.user);
  if (s_users != t_users) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(s_users.begin(), s_users.end(), t_users.begin(), t_users.end(),
                                  std::back_inserter(diff));
    throw DataError("source and target user sets differ (" + std::to_string(diff.size()) +
                    " users only in one domain, e.g. '" + diff.front() + "')");
  }
  const std::vector<std::string> ids(s_users.begin(), s_users.end());
  auto domain_of = [](std::span<const EventRecord> rs, const char* fallback) {
    return rs.empty() || rs.front().domain.empty() ? std::string(fallback) : rs.front().domain;
  };
  CorpusPair pair{InteractionCorpus::build(domain_of(source, "source"), source, &ids),
                  InteractionCorpus::build(domain_of(target, "target"), target, &ids)};
  // Regions are user attributes; share them across domains.
  for (std::size_t u = 0; u < ids.size(); ++u) {
    auto& a = pair.source.users_[u];
    auto& b = pair.target.users_[u];
    if (!a.region) a.region = b.region;
    if (!b.region) b.region = a.region;
  }
  return pair;
}

ImplicitFeedback to_implicit(std::span<const Event> events) {
  ImplicitFeedback out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.rating < 1 || e.rating > 5) throw RatingError(i, e.rating);
    auto& label = out.labels[{e.user, e.item}];
    label = std::max(label, implicit_label(e.rating));
  }
  for (const auto& [pair, label] : out.labels) {
    if (label == 1) out.positives.push_back(pair);
  }
  return out;
}

}  // namespace cicdor::data
