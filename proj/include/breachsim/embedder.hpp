#pragma once

#include "breachsim/common.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace breachsim {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<float> embed(std::string_view text) const = 0;
    virtual size_t dimension() const = 0;
    virtual std::string id() const = 0;
};

inline void l2_normalize(std::vector<float>& v) {
    double norm2 = 0.0;
    for (float x : v) norm2 += static_cast<double>(x) * x;
    if (norm2 <= 0.0) {
        if (!v.empty()) v[0] = 1.0f;
        return;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (float& x : v) x = static_cast<float>(x * inv);
}

inline double dot(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

// Offline deterministic embedder: hashed character n-gram frequencies,
// L2-normalized. No model, no network; exists so the whole pipeline and the
// test suite run fully offline. Retrieval quality claims belong to remote
// embedders configured through the gateway.
class HashedNgramEmbedder final : public Embedder {
public:
    explicit HashedNgramEmbedder(size_t dimension = 512, size_t ngram = 3)
        : dim_(dimension), ngram_(ngram) {
        if (dim_ == 0 || ngram_ == 0) {
            throw std::invalid_argument("embedder dimension and ngram must be positive");
        }
    }

    std::vector<float> embed(std::string_view text) const override {
        if (text.empty()) throw std::invalid_argument("embed: empty text");
        const std::string norm = normalize(text);
        std::vector<float> v(dim_, 0.0f);
        if (norm.size() < ngram_) {
            v[fnv1a64(norm) % dim_] += 1.0f;
        } else {
            for (size_t i = 0; i + ngram_ <= norm.size(); ++i) {
                v[fnv1a64(norm.substr(i, ngram_)) % dim_] += 1.0f;
            }
        }
        l2_normalize(v);
        return v;
    }

    size_t dimension() const override { return dim_; }

    std::string id() const override {
        return "hashed-ngram-" + std::to_string(ngram_) + "-" + std::to_string(dim_);
    }

private:
    // Lowercase with runs of whitespace collapsed, padded so edge n-grams
    // see word boundaries.
    static std::string normalize(std::string_view text) {
        std::string out = " ";
        bool in_space = true;
        for (unsigned char ch : text) {
            if (std::isspace(ch)) {
                if (!in_space) out.push_back(' ');
                in_space = true;
            } else {
                out.push_back(static_cast<char>(std::tolower(ch)));
                in_space = false;
            }
        }
        if (out.back() != ' ') out.push_back(' ');
        return out;
    }

    size_t dim_;
    size_t ngram_;
};

} // namespace breachsim
