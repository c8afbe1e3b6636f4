#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace cicdor::transport {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Endpoint {
  std::string base_url;      // scheme://host[:port]
  std::string path;          // request path, e.g. /v1/chat/completions
  std::string api_key_env;   // environment variable holding the bearer token; empty = none
  int timeout_seconds = 120;
};

/// POSTs `body` as JSON and parses the JSON reply. Non-2xx statuses, network
/// failures and malformed replies raise TransportError.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body);

/// Reads the credential named by endpoint.api_key_env. Throws when the
/// variable is named but unset.
std::string read_api_key(const Endpoint& endpoint);

}  // namespace cicdor::transport
