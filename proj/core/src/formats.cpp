/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/formats.hpp"
#include "gbd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

namespace gbd {

int CnfInstance::max_var() const {
    int m = 0;
    for (const Clause& cl : clauses) {
        for (int lit : cl) m = std::max(m, std::abs(lit));
    }
    return m;
}

size_t CnfInstance::literal_count() const {
    size_t n = 0;
    for (const Clause& cl : clauses) n += cl.size();
    return n;
}

std::vector<std::string> token_stream(std::istream& in) {
    std::vector<std::string> out;
    for_each_token(in, TokenFilter::StripCommentsAndHeader,
                   [&](std::string_view t) { out.emplace_back(t); });
    return out;
}

namespace {

[[noreturn]] void bad_token(const std::string& name, std::string_view tok) {
    std::string where = name.empty() ? "cnf input" : name;
    throw DataError(where + ": invalid token '" + std::string(tok) + "'");
}

int parse_lit(const std::string& name, std::string_view tok) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) bad_token(name, tok);
    if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min() + 1) {
        bad_token(name, tok);
    }
    return static_cast<int>(v);
}

} // namespace

CnfInstance parse_cnf(std::istream& in, const std::string& name) {
    CnfInstance out;
    Clause current;
    bool have_header = false;
    bool any_clause_token = false;
    int header_pos = 0; // tokens still expected after "p": cnf, vars, clauses

    for_each_token(in, TokenFilter::StripComments, [&](std::string_view tok) {
        if (header_pos > 0) {
            switch (header_pos) {
            case 3:
                if (tok != "cnf") bad_token(name, tok);
                break;
            case 2: {
                int v = parse_lit(name, tok);
                if (v < 0) bad_token(name, tok);
                out.num_vars_declared = v;
                break;
            }
            case 1: {
                int v = parse_lit(name, tok);
                if (v < 0) bad_token(name, tok);
                break; // declared clause count is not stored
            }
            }
            --header_pos;
            return;
        }
        if (tok == "p") {
            if (have_header || any_clause_token) bad_token(name, tok);
            have_header = true;
            header_pos = 3;
            return;
        }
        any_clause_token = true;
        int lit = parse_lit(name, tok);
        if (lit == 0) {
            out.clauses.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(lit);
        }
    });

    if (header_pos > 0) {
        throw DataError((name.empty() ? "cnf input" : name) + ": truncated header");
    }
    if (!current.empty()) {
        out.clauses.push_back(std::move(current)); // missing final 0
    }
    if (!have_header) {
        out.num_vars_declared = out.max_var();
    }
    return out;
}

void write_cnf(const CnfInstance& instance, std::ostream& out) {
    out << "p cnf " << instance.max_var() << ' ' << instance.clauses.size() << '\n';
    for (const Clause& cl : instance.clauses) {
        for (int lit : cl) out << lit << ' ';
        out << "0\n";
    }
    if (!out) throw DataError("cnf output: write failure");
}

void write_kis(const KisInstance& instance, std::ostream& out) {
    out << "c k = " << instance.k << '\n';
    out << "p edge " << instance.num_vertices << ' ' << instance.edges.size() << '\n';
    for (const auto& [u, v] : instance.edges) {
        out << "e " << u << ' ' << v << '\n';
    }
    if (!out) throw DataError("kis output: write failure");
}

} // namespace gbd
