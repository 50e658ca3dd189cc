#include "autochecker/embedding.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "autochecker/errors.hpp"
#include "http_util.hpp"

#include <json.hpp>

namespace autochecker {

double Embedding::norm() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return std::sqrt(s);
}

std::vector<std::string> LexicalEmbedder::tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

Embedding LexicalEmbedder::embed(std::string_view text) const {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw EmptyText();
    std::map<std::string, double> tf;  // sorted token order is the canonical order
    for (auto& t : tokens) tf[t] += 1.0;
    Embedding e;
    double sumsq = 0.0;
    for (auto& [tok, count] : tf) {
        e.tokens.push_back(tok);
        e.weights.push_back(count);
        sumsq += count * count;
    }
    double n = std::sqrt(sumsq);
    for (auto& w : e.weights) w /= n;
    return e;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string embedder_id)
    : endpoint_(std::move(endpoint)), id_(std::move(embedder_id)) {}

std::string HttpEmbedder::id() const {
    return id_.empty() ? "http:" + endpoint_ : id_;
}

Embedding HttpEmbedder::embed(std::string_view text) const {
    if (LexicalEmbedder::tokenize(text).empty()) throw EmptyText();
    nlohmann::json body;
    body["input"] = std::string(text);
    std::string response;
    std::string err;
    if (!detail::http_post_json(endpoint_, body.dump(), response, err))
        throw EmbeddingError("embedder request failed: " + err);
    auto parsed = nlohmann::json::parse(response, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("embedding") ||
        !parsed["embedding"].is_array())
        throw EmbeddingError("embedder response missing embedding array");
    Embedding e;
    for (const auto& v : parsed["embedding"]) e.weights.push_back(v.get<double>());
    double n = e.norm();
    if (!(n > 0.0)) throw EmbeddingError("embedder returned a zero vector");
    for (auto& w : e.weights) w /= n;
    return e;
}

double similarity(const Embedding& a, const Embedding& b) {
    if (a.sparse() != b.sparse())
        throw DimensionError("cannot compare sparse and dense vectors");
    double dot = 0.0;
    if (a.sparse()) {
        std::size_t i = 0, j = 0;
        while (i < a.tokens.size() && j < b.tokens.size()) {
            int cmp = a.tokens[i].compare(b.tokens[j]);
            if (cmp == 0) {
                dot += a.weights[i] * b.weights[j];
                ++i;
                ++j;
            } else if (cmp < 0) {
                ++i;
            } else {
                ++j;
            }
        }
    } else {
        if (a.weights.size() != b.weights.size())
            throw DimensionError("dense vectors of different dimension: " +
                                 std::to_string(a.weights.size()) + " vs " +
                                 std::to_string(b.weights.size()));
        for (std::size_t i = 0; i < a.weights.size(); ++i)
            dot += a.weights[i] * b.weights[i];
    }
    return dot;
}

}  // namespace autochecker
