#include <httplib.h>

#include "forge/error.hpp"
#include "forge/labeler.hpp"

namespace forge {

HttpClient::HttpClient(std::string url, std::string token, std::chrono::seconds timeout)
    : token_(std::move(token)), timeout_(timeout) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("completion endpoint must be an http:// or https:// URL: " + url);
    }
    const auto slash = url.find('/', scheme + 3);
    base_ = url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::string HttpClient::complete(const std::string& prompt, double temperature) const {
    httplib::Client client(base_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers;
    if (!token_.empty()) {
        headers.emplace("Authorization", "Bearer " + token_);
    }
    const nlohmann::json body = {{"prompt", prompt}, {"temperature", temperature}};
    const auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        throw ForgeError("completion request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ForgeError("completion endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
        return nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ForgeError(std::string("completion endpoint returned an unexpected body: ") + e.what());
    }
}

}  // namespace forge
