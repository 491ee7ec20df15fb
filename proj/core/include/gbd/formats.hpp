/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gbd {

using Clause = std::vector<int>;

// A CNF formula as parsed from DIMACS. Literals are nonzero ints; raw
// input may reference variables above the declared count — the sanitizer
// repairs the header, the parser does not.
struct CnfInstance {
    int num_vars_declared = 0;
    std::vector<Clause> clauses;

    // largest |literal| in the formula, 0 when empty
    int max_var() const;
    size_t literal_count() const;
};

// A k-independent-set instance: undirected graph plus target set size.
// Edges are stored normalized (u < v), 1-based, no self loops.
struct KisInstance {
    int num_vertices = 0;
    std::set<std::pair<int, int>> edges;
    int k = 0;
};

// Lexical filter applied by the tokenizer. Comment lines are lines whose
// first non-space character is 'c' followed by a space or line end; the
// same shape with 'p' identifies the header line.
enum class TokenFilter {
    StripComments,          // drop comment lines only (graph files)
    StripCommentsAndHeader, // drop comment and p-lines (cnf identity)
};

// Streams whitespace-separated tokens to fn, applying the filter.
// Purely lexical; never fails on content.
template <class Fn> void for_each_token(std::istream& in, TokenFilter filter, Fn&& fn);

// Materialized token stream with comment and header lines removed.
std::vector<std::string> token_stream(std::istream& in);

// Parses DIMACS CNF. Header is optional; an absent header sets
// num_vars_declared to the largest |literal| seen. A trailing clause
// without its 0 terminator is closed at end of input; a lone 0 yields an
// empty clause. Non-integer tokens outside comments raise DataError.
CnfInstance parse_cnf(std::istream& in, const std::string& name = "");

// Canonical CNF output: recomputed header, one clause per line,
// single-space separated, 0-terminated, no comments.
void write_cnf(const CnfInstance& instance, std::ostream& out);

// DIMACS graph output: "c k = <k>", "p edge <n> <m>", then sorted
// "e <u> <v>" lines with u < v.
void write_kis(const KisInstance& instance, std::ostream& out);

// ---------------------------------------------------------------------
// tokenizer implementation

namespace detail {

inline bool tok_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

template <class Fn> class Tokenizer {
public:
    Tokenizer(TokenFilter filter, Fn& fn) : filter_(filter), fn_(fn) {}

    void feed(const char* data, size_t n) {
        for (size_t i = 0; i < n; ++i) step(data[i]);
    }

    void finish() {
        if (state_ == State::MaybeSkip) {
            // 'c'/'p' at end of input counts as a skipped line
            if (skippable(pending_)) {
                token_.clear();
            } else {
                token_.push_back(pending_);
            }
        }
        if (!token_.empty()) {
            fn_(std::string_view(token_));
            token_.clear();
        }
    }

private:
    enum class State { LineStart, MaybeSkip, SkipLine, InLine };

    bool skippable(char c) const {
        if (c == 'c') return true;
        return c == 'p' && filter_ == TokenFilter::StripCommentsAndHeader;
    }

    void emit() {
        if (!token_.empty()) {
            fn_(std::string_view(token_));
            token_.clear();
        }
    }

    void step(char c) {
        switch (state_) {
        case State::LineStart:
            if (c == '\n') return;
            if (tok_space(c)) return; // leading spaces keep line-start status
            if (skippable(c)) {
                pending_ = c;
                state_ = State::MaybeSkip;
                return;
            }
            token_.push_back(c);
            state_ = State::InLine;
            return;
        case State::MaybeSkip:
            if (c == '\n') { // "c" / "p" alone on a line
                state_ = State::LineStart;
                return;
            }
            if (tok_space(c)) {
                state_ = State::SkipLine;
                return;
            }
            token_.push_back(pending_);
            token_.push_back(c);
            state_ = State::InLine;
            return;
        case State::SkipLine:
            if (c == '\n') state_ = State::LineStart;
            return;
        case State::InLine:
            if (c == '\n') {
                emit();
                state_ = State::LineStart;
                return;
            }
            if (tok_space(c)) {
                emit();
                return;
            }
            token_.push_back(c);
            return;
        }
    }

    TokenFilter filter_;
    Fn& fn_;
    State state_ = State::LineStart;
    char pending_ = 0;
    std::string token_;
};

} // namespace detail

template <class Fn> void for_each_token(std::istream& in, TokenFilter filter, Fn&& fn) {
    detail::Tokenizer<Fn> tok(filter, fn);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        tok.feed(buf, static_cast<size_t>(in.gcount()));
    }
    tok.finish();
}

} // namespace gbd
