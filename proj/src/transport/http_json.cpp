#include "cicdor/transport/http_json.hpp"

#include <cstdlib>

#include <httplib.h>

namespace cicdor::transport {

std::string read_api_key(const Endpoint& endpoint) {
  if (endpoint.api_key_env.empty()) return {};
  const char* v = std::getenv(endpoint.api_key_env.c_str());
  if (v == nullptr || *v == '\0') {
    throw TransportError("environment variable " + endpoint.api_key_env + " is not set");
  }
  return v;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body) {
  if (endpoint.base_url.empty()) throw TransportError("endpoint base URL is empty");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (endpoint.base_url.rfind("https://", 0) == 0) {
    throw TransportError("https endpoint requested but this build has no TLS support");
  }
#endif
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(endpoint.timeout_seconds, 0);
  client.set_read_timeout(endpoint.timeout_seconds, 0);

  httplib::Headers headers;
  const auto key = read_api_key(endpoint);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  const auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + endpoint.base_url + endpoint.path + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("POST " + endpoint.path + " returned HTTP " + std::to_string(res->status) +
                         ": " + res->body.substr(0, 500));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(std::string("reply is not JSON: ") + e.what());
  }
}

}  // namespace cicdor::transport
