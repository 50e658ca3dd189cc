#include "http_util.hpp"

#include <httplib.h>

namespace autochecker::detail {

bool split_url(const std::string& url, UrlParts& out) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return false;
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return true;
}

bool http_post_json(const std::string& url, const std::string& body,
                    std::string& response, std::string& err,
                    const std::string& bearer_token) {
    UrlParts parts;
    if (!split_url(url, parts)) {
        err = "malformed endpoint url: " + url;
        return false;
    }
    httplib::Client client(parts.base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!bearer_token.empty())
        headers.emplace("Authorization", "Bearer " + bearer_token);
    auto res = client.Post(parts.path, headers, body, "application/json");
    if (!res) {
        err = "transport failure: " + httplib::to_string(res.error());
        return false;
    }
    if (res->status < 200 || res->status >= 300) {
        err = "http status " + std::to_string(res->status);
        return false;
    }
    response = res->body;
    return true;
}

}  // namespace autochecker::detail
