#pragma once

#include "breachsim/common.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace breachsim {

struct Chunk {
    std::string doc_id;
    size_t ordinal = 0;
    size_t begin = 0; // character offsets into the source document
    size_t end = 0;
    std::string text;

    std::string key() const { return doc_id + "#" + std::to_string(ordinal); }
};

namespace detail {

// Chooses where to end the chunk starting at `start`, preferring in order:
// blank line, newline, sentence terminator followed by a space, space, and
// finally a raw cut at the size limit. Only positions past start+overlap are
// eligible so the next start always advances.
inline size_t pick_break(std::string_view text, size_t start, size_t chunk_size,
                         size_t overlap) {
    const size_t hard_end = start + chunk_size;
    const size_t min_end = start + overlap + 1;

    size_t best_blank = 0, best_newline = 0, best_sentence = 0, best_space = 0;
    for (size_t i = start; i < hard_end; ++i) {
        const char c = text[i];
        if (c == '\n') {
            if (i + 1 < hard_end && text[i + 1] == '\n') {
                if (i + 2 >= min_end && i + 2 <= hard_end) best_blank = i + 2;
            }
            if (i + 1 >= min_end) best_newline = i + 1;
        } else if ((c == '.' || c == '!' || c == '?') && i + 1 < hard_end &&
                   text[i + 1] == ' ') {
            if (i + 2 >= min_end && i + 2 <= hard_end) best_sentence = i + 2;
        } else if (c == ' ') {
            if (i + 1 >= min_end) best_space = i + 1;
        }
    }
    if (best_blank) return best_blank;
    if (best_newline) return best_newline;
    if (best_sentence) return best_sentence;
    if (best_space) return best_space;
    return hard_end;
}

} // namespace detail

// Splits `text` into overlapping chunks of at most `chunk_size` characters.
// Consecutive chunks share exactly `overlap` trailing characters; on text
// with no preferred boundary this degenerates to a sliding window with
// stride chunk_size - overlap.
inline std::vector<Chunk> chunk_document(std::string_view text, const std::string& doc_id,
                                         size_t chunk_size, size_t overlap) {
    if (chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
    if (overlap >= chunk_size) {
        throw std::invalid_argument("overlap must be smaller than chunk_size");
    }

    std::vector<Chunk> chunks;
    if (text.empty()) return chunks;

    size_t start = 0;
    while (true) {
        Chunk c;
        c.doc_id = doc_id;
        c.ordinal = chunks.size();
        c.begin = start;
        if (text.size() - start <= chunk_size) {
            c.end = text.size();
            c.text = std::string(text.substr(start));
            chunks.push_back(std::move(c));
            break;
        }
        const size_t end = detail::pick_break(text, start, chunk_size, overlap);
        c.end = end;
        c.text = std::string(text.substr(start, end - start));
        chunks.push_back(std::move(c));
        start = end - overlap;
    }
    return chunks;
}

} // namespace breachsim
