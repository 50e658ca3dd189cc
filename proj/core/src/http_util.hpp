#pragma once

// Shared HTTP plumbing for the remote embedder and LLM clients. Not installed.

#include <string>

namespace autochecker::detail {

struct UrlParts {
    std::string base;  // scheme://host[:port]
    std::string path;  // /path, "/" when absent
};

bool split_url(const std::string& url, UrlParts& out);

/// POST application/json. bearer_token is optional. Returns false and fills
/// err on transport failure or non-2xx status.
bool http_post_json(const std::string& url, const std::string& body,
                    std::string& response, std::string& err,
                    const std::string& bearer_token = "");

}  // namespace autochecker::detail
