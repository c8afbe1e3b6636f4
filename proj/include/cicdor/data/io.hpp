#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/data/splits.hpp"

namespace cicdor::data {

/// Reads a JSON-lines events file. Each line holds
/// {"user", "item", "rating", "review", "region", "domain"}; review and region
/// may be null or absent. Blank lines are skipped. Errors name the line.
std::vector<EventRecord> load_events(const std::filesystem::path& path);
void save_events(const std::filesystem::path& path, std::span<const EventRecord> records);

/// Split file: {"setting", "shift_ratio", "seed", "region"?, "train", "val",
/// "test"} where each pair is [user_id, item_id].
void save_split(const std::filesystem::path& path, const OodSplit& split,
                const InteractionCorpus& corpus);
OodSplit load_split(const std::filesystem::path& path, const InteractionCorpus& corpus);

/// Candidate file: array of {"user", "positive", "negatives": [...]}.
void save_candidates(const std::filesystem::path& path, std::span<const EvalCandidateSet> sets,
                     const InteractionCorpus& corpus);
std::vector<EvalCandidateSet> load_candidates(const std::filesystem::path& path,
                                              const InteractionCorpus& corpus);

}  // namespace cicdor::data
