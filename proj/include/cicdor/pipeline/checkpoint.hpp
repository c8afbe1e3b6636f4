#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cicdor/numerics/layers.hpp"

namespace cicdor::pipeline {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::vector<std::pair<std::string, Matrix>> tensors;
  nlohmann::json meta = nlohmann::json::object();
};

Checkpoint snapshot(const std::vector<nn::NamedParam>& params);
/// Copies tensor values back by name; every parameter must be present with
/// matching shape.
void restore(const Checkpoint& ckpt, std::vector<nn::NamedParam>& params);

/// Writes <stem>.bin (magic, version, raw little-endian doubles) and
/// <stem>.json (version, meta, name/shape/offset of each tensor).
void save_checkpoint(const std::filesystem::path& stem, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& stem);

}  // namespace cicdor::pipeline
