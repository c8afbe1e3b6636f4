#include "cicdor/representation/text_encoder.hpp"

#include <cctype>

#include "cicdor/numerics/random.hpp"

namespace cicdor::representation {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

MockTextEncoder::MockTextEncoder(std::uint64_t seed, Index table_rows)
    : seed_(seed), table_(table_rows, kTextDim) {
  numerics::Rng rng(numerics::mix_seed(seed, 0x7e47));
  for (Index i = 0; i < table_.rows(); ++i)
    for (Index j = 0; j < kTextDim; ++j) table_(i, j) = rng.normal();
}

Matrix MockTextEncoder::encode(std::span<const std::string> texts) {
  Matrix out = Matrix::Zero(static_cast<Index>(texts.size()), kTextDim);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto tokens = tokenize(texts[i]);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) {
      const auto row = static_cast<Index>(fnv1a(t, 0xcbf29ce484222325ULL ^ seed_) %
                                          static_cast<std::uint64_t>(table_.rows()));
      out.row(static_cast<Index>(i)) += table_.row(row);
    }
    out.row(static_cast<Index>(i)) /= static_cast<double>(tokens.size());
  }
  return out;
}

HttpTextEncoder::HttpTextEncoder(transport::Endpoint endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {
  if (endpoint_.path.empty()) endpoint_.path = "/v1/embeddings";
}

Matrix HttpTextEncoder::encode(std::span<const std::string> texts) {
  nlohmann::json body{{"model", model_}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  nlohmann::json reply;
  try {
    reply = transport::post_json(endpoint_, body);
  } catch (const transport::TransportError& e) {
    throw TextEncoderError(e.what());
  }
  const auto data = reply.find("data");
  if (data == reply.end() || !data->is_array() || data->size() != texts.size()) {
    throw TextEncoderError("embedding reply lacks one data entry per input");
  }
  Matrix out(static_cast<Index>(texts.size()), kTextDim);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& emb = (*data)[i].at("embedding");
    if (!emb.is_array() || emb.size() != static_cast<std::size_t>(kTextDim)) {
      throw TextEncoderError("embedding " + std::to_string(i) + " is not 384-dimensional");
    }
    for (Index j = 0; j < kTextDim; ++j) out(static_cast<Index>(i), j) = emb[static_cast<std::size_t>(j)].get<double>();
  }
  return out;
}

Matrix encode_documents(TextEncoderPort& encoder, std::span<const std::string> ids,
                        std::span<const std::string> documents, std::size_t chunk) {
  if (ids.size() != documents.size()) throw TextEncoderError("ids and documents differ in length");
  Matrix out(static_cast<Index>(documents.size()), kTextDim);
  auto check = [&](const Matrix& m, std::size_t expect) {
    if (m.rows() != static_cast<Index>(expect) || m.cols() != kTextDim) {
      throw TextEncoderError(encoder.name() + " returned a " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " matrix");
    }
    if (!all_finite(m)) throw TextEncoderError(encoder.name() + " returned non-finite values");
  };
  for (std::size_t start = 0; start < documents.size(); start += chunk) {
    const std::size_t len = std::min(chunk, documents.size() - start);
    try {
      Matrix m = encoder.encode(documents.subspan(start, len));
      check(m, len);
      out.middleRows(static_cast<Index>(start), static_cast<Index>(len)) = m;
    } catch (const std::exception&) {
      for (std::size_t i = start; i < start + len; ++i) {
        try {
          Matrix m = encoder.encode(documents.subspan(i, 1));
          check(m, 1);
          out.row(static_cast<Index>(i)) = m.row(0);
        } catch (const std::exception& e) {
          throw TextEncoderError("encoding document '" + ids[i] + "' failed: " + e.what());
        }
      }
    }
  }
  return out;
}

}  // namespace cicdor::representation
