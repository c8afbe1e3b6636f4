#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cicdor/numerics/matrix.hpp"
#include "cicdor/transport/http_json.hpp"

namespace cicdor::representation {

inline constexpr Index kTextDim = 384;

class TextEncoderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps documents to fixed 384-d vectors, one row per input text.
class TextEncoderPort {
 public:
  virtual ~TextEncoderPort() = default;
  virtual Matrix encode(std::span<const std::string> texts) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic offline encoder: every token hashes into a fixed table of
/// Gaussian rows and a document is the mean of its tokens' rows. The empty
/// document encodes to zeros.
class MockTextEncoder : public TextEncoderPort {
 public:
  explicit MockTextEncoder(std::uint64_t seed = 0, Index table_rows = 4096);
  Matrix encode(std::span<const std::string> texts) override;
  std::string name() const override { return "mock-hash-384"; }

 private:
  std::uint64_t seed_;
  Matrix table_;
};

/// Calls an embeddings service: POST {"model", "input": [texts]} and reads
/// data[i].embedding from the reply.
class HttpTextEncoder : public TextEncoderPort {
 public:
  HttpTextEncoder(transport::Endpoint endpoint, std::string model);
  Matrix encode(std::span<const std::string> texts) override;
  std::string name() const override { return model_; }

 private:
  transport::Endpoint endpoint_;
  std::string model_;
};

/// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Encodes documents in chunks. A failing chunk is retried one document at a
/// time so the error names the offending document id.
Matrix encode_documents(TextEncoderPort& encoder, std::span<const std::string> ids,
                        std::span<const std::string> documents, std::size_t chunk = 64);

}  // namespace cicdor::representation
