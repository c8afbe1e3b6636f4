#include "cicdor/data/io.hpp"

#include <fstream>

#include <json.hpp>

namespace cicdor::data {
namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json pairs_to_json(const std::vector<Interaction>& pairs, const InteractionCorpus& corpus) {
  json out = json::array();
  for (const auto& p : pairs) {
    out.push_back({corpus.users()[static_cast<std::size_t>(p.user)].id,
                   corpus.items()[static_cast<std::size_t>(p.item)]});
  }
  return out;
}

std::vector<Interaction> pairs_from_json(const json& j, const InteractionCorpus& corpus) {
  std::vector<Interaction> out;
  for (const auto& p : j) {
    out.push_back({corpus.user_index(p.at(0).get<std::string>()),
                   corpus.item_index(p.at(1).get<std::string>())});
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<EventRecord> load_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<EventRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      EventRecord r;
      r.user = j.at("user").get<std::string>();
      r.item = j.at("item").get<std::string>();
      r.rating = j.at("rating").get<int>();
      r.review = optional_string(j, "review");
      r.region = optional_string(j, "region");
      r.domain = j.value("domain", std::string{});
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_events(const std::filesystem::path& path, std::span<const EventRecord> records) {
  auto out = open_out(path);
  for (const auto& r : records) {
    json j{{"user", r.user}, {"item", r.item}, {"rating", r.rating}, {"domain", r.domain}};
    j["review"] = r.review ? json(*r.review) : json(nullptr);
    j["region"] = r.region ? json(*r.region) : json(nullptr);
    out << j.dump() << '\n';
  }
}

void save_split(const std::filesystem::path& path, const OodSplit& split,
                const InteractionCorpus& corpus) {
  json j{{"setting", to_string(split.setting)},
         {"shift_ratio", split.shift_ratio},
         {"seed", split.seed},
         {"train", pairs_to_json(split.train, corpus)},
         {"val", pairs_to_json(split.val, corpus)},
         {"test", pairs_to_json(split.test, corpus)}};
  if (split.region) j["region"] = *split.region;
  open_out(path) << j.dump() << '\n';
}

OodSplit load_split(const std::filesystem::path& path, const InteractionCorpus& corpus) {
  const json j = read_json(path);
  OodSplit split;
  split.setting = split_setting_from_string(j.at("setting").get<std::string>());
  split.shift_ratio = j.at("shift_ratio").get<double>();
  split.seed = j.at("seed").get<std::uint64_t>();
  split.region = optional_string(j, "region");
  split.train = pairs_from_json(j.at("train"), corpus);
  split.val = pairs_from_json(j.at("val"), corpus);
  split.test = pairs_from_json(j.at("test"), corpus);
  return split;
}

void save_candidates(const std::filesystem::path& path, std::span<const EvalCandidateSet> sets,
                     const InteractionCorpus& corpus) {
  json out = json::array();
  for (const auto& s : sets) {
    json negs = json::array();
    for (const auto i : s.negatives) negs.push_back(corpus.items()[static_cast<std::size_t>(i)]);
    out.push_back({{"user", corpus.users()[static_cast<std::size_t>(s.user)].id},
                   {"positive", corpus.items()[static_cast<std::size_t>(s.positive_item)]},
                   {"negatives", negs}});
  }
  open_out(path) << out.dump() << '\n';
}

std::vector<EvalCandidateSet> load_candidates(const std::filesystem::path& path,
                                              const InteractionCorpus& corpus) {
  const json j = read_json(path);
  std::vector<EvalCandidateSet> out;
  for (const auto& s : j) {
    EvalCandidateSet set;
    set.user = corpus.user_index(s.at("user").get<std::string>());
    set.positive_item = corpus.item_index(s.at("positive").get<std::string>());
    for (const auto& n : s.at("negatives")) set.negatives.push_back(corpus.item_index(n.get<std::string>()));
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace cicdor::data
