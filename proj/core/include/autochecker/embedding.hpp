#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace autochecker {

/// A unit-length embedding. Sparse vectors (lexical embedder) carry their
/// token labels sorted lexicographically; dense vectors (remote embedders)
/// leave tokens empty.
struct Embedding {
    std::vector<std::string> tokens;
    std::vector<double> weights;

    bool sparse() const { return !tokens.empty(); }
    double norm() const;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::string id() const = 0;
    /// Returns an L2-normalized vector. Throws EmptyText if nothing is left
    /// after normalization, EmbeddingError on backend failure.
    virtual Embedding embed(std::string_view text) const = 0;
};

/// Deterministic fallback: lowercase, split on non-alphanumerics,
/// term-frequency vector over tokens, L2-normalized.
class LexicalEmbedder final : public Embedder {
public:
    std::string id() const override { return "lexical-tf/1"; }
    Embedding embed(std::string_view text) const override;

    static std::vector<std::string> tokenize(std::string_view text);
};

/// Remote embedder speaking a minimal JSON protocol:
/// POST {"input": <text>} -> {"embedding": [..]}. The response is
/// re-normalized so the unit-norm contract holds regardless of the server.
class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(std::string endpoint, std::string embedder_id = "");
    std::string id() const override;
    Embedding embed(std::string_view text) const override;

private:
    std::string endpoint_;
    std::string id_;
};

/// Cosine similarity of two unit vectors (= dot product). Sparse vectors
/// join on token labels; dense vectors require equal dimensionality.
/// Mixing sparse and dense raises DimensionError.
double similarity(const Embedding& a, const Embedding& b);

}  // namespace autochecker
