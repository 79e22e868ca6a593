#pragma once

#include "breachsim/chunker.hpp"
#include "breachsim/common.hpp"
#include "breachsim/embedder.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace breachsim {

struct ChunkParams {
    size_t chunk_size = 5000;
    size_t overlap = 500;
};

struct RetrievalResult {
    std::string doc_id;
    size_t ordinal = 0;
    double score = 0.0; // cosine similarity, vectors are unit length
    std::string text;

    std::string chunk_key() const { return doc_id + "#" + std::to_string(ordinal); }
};

// Built single-writer, then immutable; queries may run concurrently.
class ChunkIndex {
public:
    ChunkIndex() = default;
    ChunkIndex(std::shared_ptr<const Embedder> embedder, ChunkParams params)
        : embedder_(std::move(embedder)), params_(params) {}

    const ChunkParams& params() const { return params_; }
    const Embedder& embedder() const { return *embedder_; }
    size_t size() const { return chunks_.size(); }
    bool empty() const { return chunks_.empty(); }
    size_t document_count() const { return doc_chunk_counts_.size(); }
    const std::map<std::string, size_t>& per_document_counts() const {
        return doc_chunk_counts_;
    }
    const std::vector<Chunk>& chunks() const { return chunks_; }
    const std::vector<std::vector<float>>& vectors() const { return vectors_; }

    void add_document(const std::string& doc_id, std::string_view text) {
        if (doc_chunk_counts_.count(doc_id)) {
            throw std::invalid_argument("document already indexed: " + doc_id);
        }
        std::vector<Chunk> chunks =
            chunk_document(text, doc_id, params_.chunk_size, params_.overlap);
        doc_chunk_counts_[doc_id] = chunks.size();
        for (Chunk& c : chunks) {
            vectors_.push_back(embedder_->embed(c.text));
            chunks_.push_back(std::move(c));
        }
    }

    // Exact top-k by cosine similarity, full scan. Ties break by ascending
    // (doc_id, ordinal). With distinct_docs set, at most one chunk per
    // document is returned.
    std::vector<RetrievalResult> query(std::string_view text, size_t k,
                                       bool distinct_docs = false) const {
        if (k == 0) throw std::invalid_argument("query: k must be >= 1");
        if (chunks_.empty()) return {};
        const std::vector<float> q = embedder_->embed(text);
        if (q.size() != embedder_->dimension()) {
            throw std::runtime_error("query: embedder dimension mismatch");
        }

        std::vector<size_t> order(chunks_.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<double> scores(chunks_.size());
        for (size_t i = 0; i < chunks_.size(); ++i) scores[i] = dot(q, vectors_[i]);

        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            if (chunks_[a].doc_id != chunks_[b].doc_id) {
                return chunks_[a].doc_id < chunks_[b].doc_id;
            }
            return chunks_[a].ordinal < chunks_[b].ordinal;
        });

        std::vector<RetrievalResult> out;
        std::set<std::string> seen_docs;
        for (size_t i = 0; i < order.size() && out.size() < k; ++i) {
            const Chunk& c = chunks_[order[i]];
            if (distinct_docs && !seen_docs.insert(c.doc_id).second) continue;
            out.push_back({c.doc_id, c.ordinal, scores[order[i]], c.text});
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json doc;
        doc["format"] = "breachsim-index-v1";
        doc["params"] = {{"chunk_size", params_.chunk_size},
                         {"overlap", params_.overlap},
                         {"embedder_id", embedder_->id()},
                         {"dimension", embedder_->dimension()}};
        doc["chunks"] = nlohmann::json::array();
        for (size_t i = 0; i < chunks_.size(); ++i) {
            const Chunk& c = chunks_[i];
            doc["chunks"].push_back({{"doc", c.doc_id},
                                     {"ordinal", c.ordinal},
                                     {"begin", c.begin},
                                     {"end", c.end},
                                     {"text", c.text},
                                     {"vector", vectors_[i]}});
        }
        return doc;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ParseError("cannot write index file: " + path);
        out << to_json().dump();
    }

    static ChunkIndex load(const std::string& path, std::shared_ptr<const Embedder> embedder) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open index file: " + path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("index file " + path + ": " + e.what());
        }
        if (doc.value("format", "") != "breachsim-index-v1") {
            throw ValidationError({"/format: not a breachsim index file"});
        }
        const auto& p = doc["params"];
        if (p.value("embedder_id", "") != embedder->id()) {
            throw ValidationError({"/params/embedder_id: index was built with '" +
                                   p.value("embedder_id", std::string()) +
                                   "', loaded embedder is '" + embedder->id() + "'"});
        }
        if (p.value("dimension", size_t{0}) != embedder->dimension()) {
            throw ValidationError({"/params/dimension: mismatch with loaded embedder"});
        }
        ChunkIndex idx(std::move(embedder),
                       ChunkParams{p.value("chunk_size", size_t{5000}),
                                   p.value("overlap", size_t{500})});
        for (const auto& entry : doc["chunks"]) {
            Chunk c;
            c.doc_id = entry.at("doc").get<std::string>();
            c.ordinal = entry.at("ordinal").get<size_t>();
            c.begin = entry.at("begin").get<size_t>();
            c.end = entry.at("end").get<size_t>();
            c.text = entry.at("text").get<std::string>();
            std::vector<float> v = entry.at("vector").get<std::vector<float>>();
            if (v.size() != idx.embedder_->dimension()) {
                throw ValidationError({"/chunks: vector dimension mismatch"});
            }
            double norm2 = 0.0;
            for (float x : v) norm2 += static_cast<double>(x) * x;
            if (std::abs(norm2 - 1.0) > 2e-6) {
                throw ValidationError({"/chunks: stored vector is not unit length"});
            }
            idx.doc_chunk_counts_[c.doc_id] += 1;
            idx.vectors_.push_back(std::move(v));
            idx.chunks_.push_back(std::move(c));
        }
        return idx;
    }

    uint64_t digest() const { return fnv1a64(to_json().dump()); }

private:
    std::shared_ptr<const Embedder> embedder_;
    ChunkParams params_;
    std::vector<Chunk> chunks_;
    std::vector<std::vector<float>> vectors_;
    std::map<std::string, size_t> doc_chunk_counts_;
};

struct IngestReport {
    size_t documents = 0;
    size_t chunks = 0;
    std::vector<std::string> skipped; // unreadable files
};

// One document per file, deterministic order by filename.
inline ChunkIndex ingest_corpus(const std::string& directory, ChunkParams params,
                                std::shared_ptr<const Embedder> embedder,
                                IngestReport* report = nullptr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) {
        throw ParseError("corpus directory not found: " + directory);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        // Dangling symlinks are kept as candidates so they surface as
        // skipped-with-warning instead of vanishing silently.
        if (entry.is_regular_file() || fs::is_symlink(entry.symlink_status())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    ChunkIndex index(std::move(embedder), params);
    IngestReport local;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) {
            local.skipped.push_back(path.filename().string());
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) {
            local.skipped.push_back(path.filename().string());
            continue;
        }
        index.add_document(path.filename().string(), ss.str());
        local.documents += 1;
    }
    local.chunks = index.size();
    if (local.documents == 0) {
        throw ValidationError({"corpus directory has no readable documents: " + directory});
    }
    if (report) *report = local;
    return index;
}

} // namespace breachsim
