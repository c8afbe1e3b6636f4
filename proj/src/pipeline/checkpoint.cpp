#include "cicdor/pipeline/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace cicdor::pipeline {

namespace {

constexpr char kMagic[8] = {'C', 'I', 'C', 'D', 'C', 'K', 'P', 'T'};

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

Checkpoint snapshot(const std::vector<nn::NamedParam>& params) {
  Checkpoint c;
  for (const auto& p : params) c.tensors.emplace_back(p.name, p.var.value());
  return c;
}

void restore(const Checkpoint& ckpt, std::vector<nn::NamedParam>& params) {
  for (auto& p : params) {
    const auto it = std::find_if(ckpt.tensors.begin(), ckpt.tensors.end(),
                                 [&](const auto& t) { return t.first == p.name; });
    if (it == ckpt.tensors.end()) throw CheckpointError("checkpoint lacks tensor " + p.name);
    if (it->second.rows() != p.var.rows() || it->second.cols() != p.var.cols())
      throw CheckpointError("checkpoint tensor " + p.name + " has the wrong shape");
    p.var.mutable_value() = it->second;
  }
}

void save_checkpoint(const std::filesystem::path& stem, const Checkpoint& ckpt) {
  static_assert(std::endian::native == std::endian::little, "checkpoints are little-endian");
  std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw CheckpointError("cannot write " + with_ext(stem, ".bin").string());
  bin.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kCheckpointVersion;
  bin.write(reinterpret_cast<const char*>(&version), sizeof version);

  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, m] : ckpt.tensors) {
    // Row-major on disk regardless of Eigen's storage order.
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        bin.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(m.size());
  }
  if (!bin) throw CheckpointError("failed writing " + with_ext(stem, ".bin").string());

  const nlohmann::json manifest = {
      {"format", "cicdor-checkpoint"}, {"version", kCheckpointVersion}, {"meta", ckpt.meta}, {"tensors", tensors}};
  std::ofstream js(with_ext(stem, ".json"));
  if (!js) throw CheckpointError("cannot write " + with_ext(stem, ".json").string());
  js << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& stem) {
  std::ifstream js(with_ext(stem, ".json"));
  if (!js) throw CheckpointError("cannot open " + with_ext(stem, ".json").string());
  nlohmann::json manifest;
  try {
    js >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(with_ext(stem, ".json").string() + ": " + e.what());
  }
  if (manifest.value("format", "") != "cicdor-checkpoint" || manifest.value("version", 0) != kCheckpointVersion)
    throw CheckpointError(with_ext(stem, ".json").string() + ": unsupported checkpoint format");

  std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw CheckpointError("cannot open " + with_ext(stem, ".bin").string());
  char magic[8];
  std::uint32_t version = 0;
  bin.read(magic, sizeof magic);
  bin.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!bin || std::memcmp(magic, kMagic, sizeof magic) != 0 || version != kCheckpointVersion)
    throw CheckpointError(with_ext(stem, ".bin").string() + ": bad header");
  const auto data_start = bin.tellg();

  Checkpoint c;
  c.meta = manifest.value("meta", nlohmann::json::object());
  for (const auto& t : manifest.at("tensors")) {
    const auto rows = t.at("rows").get<Index>();
    const auto cols = t.at("cols").get<Index>();
    const auto offset = t.at("offset").get<std::uint64_t>();
    bin.seekg(data_start + static_cast<std::streamoff>(offset * sizeof(double)));
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index col = 0; col < cols; ++col) bin.read(reinterpret_cast<char*>(&m(r, col)), sizeof(double));
    if (!bin) throw CheckpointError(with_ext(stem, ".bin").string() + ": truncated tensor " + t.at("name").get<std::string>());
    c.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
  }
  return c;
}

}  // namespace cicdor::pipeline
