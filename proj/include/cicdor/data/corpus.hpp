#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::data {

/// One line of an events file, before indexing.
struct EventRecord {
  std::string user;
  std::string item;
  int rating = 0;
  std::optional<std::string> review;
  std::optional<std::string> region;
  std::string domain;
};

struct User {
  std::string id;
  std::optional<std::string> region;
};

struct Event {
  Index user = 0;
  Index item = 0;
  int rating = 0;
  std::optional<std::string> review;
};

struct Interaction {
  Index user = 0;
  Index item = 0;
  auto operator<=>(const Interaction&) const = default;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rating out of [1, 5]; carries the offending event position.
class RatingError : public DataError {
 public:
  RatingError(std::size_t event_index, int rating);
  std::size_t event_index() const { return event_index_; }

 private:
  std::size_t event_index_;
};

/// Users, items and rated events of one domain. Users and items are indexed in
/// ascending id order, so ordering by index is ordering by id.
class InteractionCorpus {
 public:
  InteractionCorpus() = default;

  /// Builds a corpus from records of one domain. When `user_ids` is given the
  /// user index follows that list and every record must reference one of them.
  static InteractionCorpus build(std::string domain, std::span<const EventRecord> records,
                                 const std::vector<std::string>* user_ids = nullptr);

  const std::string& domain_name() const { return domain_; }
  const std::vector<User>& users() const { return users_; }
  const std::vector<std::string>& items() const { return items_; }
  const std::vector<Event>& events() const { return events_; }
  Index num_users() const { return static_cast<Index>(users_.size()); }
  Index num_items() const { return static_cast<Index>(items_.size()); }

  Index user_index(const std::string& id) const;
  Index item_index(const std::string& id) const;

  /// Number of events per user (the degree index).
  const std::vector<Index>& degree() const { return degree_; }
  bool has_region_metadata() const;

  /// Items the user rated at all, sorted ascending.
  std::vector<Index> rated_items(Index user) const;

 private:
  friend struct CorpusPair make_corpus_pair(std::span<const EventRecord>, std::span<const EventRecord>);

  std::string domain_;
  std::vector<User> users_;
  std::vector<std::string> items_;
  std::vector<Event> events_;
  std::vector<Index> degree_;
  std::unordered_map<std::string, Index> user_lookup_;
  std::unordered_map<std::string, Index> item_lookup_;
};

/// Source and target corpora over one shared, identically indexed user set.
struct CorpusPair {
  InteractionCorpus source;
  InteractionCorpus target;
};

/// Throws DataError unless both record sets reference exactly the same users.
CorpusPair make_corpus_pair(std::span<const EventRecord> source, std::span<const EventRecord> target);

struct ImplicitFeedback {
  std::vector<Interaction> positives;     // sorted, unique
  std::map<Interaction, int> labels;      // every rated pair -> 0/1
};

/// Rating >= 4 is a positive. A pair rated more than once is positive if any
/// of its ratings is. Throws RatingError on a rating outside [1, 5].
ImplicitFeedback to_implicit(std::span<const Event> events);

inline int implicit_label(int rating) { return rating >= 4 ? 1 : 0; }

}  // namespace cicdor::data
