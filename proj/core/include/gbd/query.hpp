/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include "gbd/store.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gbd::query {

// query      := disj | e
// disj       := conj ( "or" conj )*
// conj       := atom ( "and" atom )*
// atom       := "(" disj ")" | constraint
// constraint := fref cmp rhs
// cmp        := "=" | "!=" | "<=" | ">=" | "<" | ">" | "like" | "unlike"
// rhs        := term | pattern | string
// fref       := [ name ":" ] name
// term       := number | "(" fref ")" | "(" term arith term ")"
// arith      := "+" | "-" | "*" | "/"
// pattern    := "%"? string "%"?          (like/unlike only)
// string     := [a-zA-Z0-9_./-]+
//
// "and" binds tighter than "or"; keywords are case-insensitive; the empty
// query matches everything. This grammar is the compatibility contract
// for the CLI, the web service, and any binding.

enum class Cmp { Eq, Ne, Lt, Gt, Le, Ge, Like, Unlike };
enum class ArithOp { Add, Sub, Mul, Div };

struct FeatureRef {
    std::optional<std::string> source;
    std::string name;

    std::string display() const { return source ? *source + ":" + name : name; }
};

// "src:feat" or "feat"; used for -r/-g arguments outside query text
FeatureRef parse_feature_ref(const std::string& text);

struct Term {
    enum class Kind { Number, Feature, Binary };
    Kind kind = Kind::Number;
    std::string number_text;
    double number_value = 0.0;
    FeatureRef ref;
    ArithOp op = ArithOp::Add;
    std::unique_ptr<Term> lhs, rhs;
};

struct Rhs {
    enum class Kind { Text, Pattern, Term };
    Kind kind = Kind::Text;
    std::string text;           // Text and Pattern payload
    bool percent_before = false; // %e  (match suffix)
    bool percent_after = false;  // e%  (match prefix)
    std::unique_ptr<Term> term;
};

struct Constraint {
    FeatureRef ref;
    Cmp op = Cmp::Eq;
    Rhs rhs;
};

struct Node {
    enum class Kind { MatchAll, And, Or, Constraint };
    Kind kind = Kind::MatchAll;
    std::unique_ptr<Node> lhs, rhs;
    Constraint constraint;
};

struct Ast {
    std::unique_ptr<Node> root;
};

// SyntaxError with position on malformed input; empty text parses to
// match-all.
Ast parse_query(const std::string& text);

// Canonical text form; parse(pretty(ast)) reproduces the same tree.
std::string pretty(const Ast& ast);

// ---------------------------------------------------------------------
// resolution

// Crossing from the base context to a feature's context goes through a
// to_{cxt} mapping feature; forward routes are keyed by base-context ids,
// backward routes keyed by the foreign ids with base ids as values.
struct MappingRoute {
    int source_index = -1;
    std::string feature;
    bool forward = true;
};

struct ResolvedFeature {
    std::string display;
    bool is_hash = false; // pseudo-feature: the instance key
    int source_index = -1;
    FeatureDef def;
    // mapping features resolve directly: forward when their value side is
    // foreign, inverted when the base context is their target
    bool is_mapping = false;
    bool mapping_inverted = false;
    bool foreign = false; // reached through route
    MappingRoute route;
};

struct Plan {
    std::string base_context;
    Ast ast;
    std::map<std::string, ResolvedFeature> features; // by display text
    std::vector<std::string> resolve_columns;        // display texts, in order
    std::string group_column;                        // display text
};

// Binds every feature reference to a (source, feature) relation, picks
// the base context from the group key (or the explicit override used by
// extraction/transformation runs), and locates mapping routes for
// cross-context references. Unknown features, unknown sources, and
// unmapped context pairs raise DataError.
Plan resolve(Ast ast, const Configuration& cfg, const std::vector<FeatureRef>& resolve_features,
             const FeatureRef& group_by, const std::optional<std::string>& base_context = {});

inline FeatureRef hash_group() { return FeatureRef{std::nullopt, "hash"}; }

// ---------------------------------------------------------------------
// execution

enum class Collapse { None, Min, Max, Avg, Count };

Collapse collapse_from_string(const std::string& name); // SyntaxError when unknown

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Evaluates the plan over all instances of the base context (the union
// of hashes known to its sources). One-to-many features satisfy a
// constraint when any value does; absent one-to-one values compare as
// their default; order comparisons are numeric when both sides parse as
// numbers, else byte-wise. Rows are grouped by the group key and sorted
// by it; multi-valued cells are reduced by the collapse function.
ResultTable execute(const Plan& plan, const Configuration& cfg, Collapse collapse);

// parse + resolve + execute
ResultTable run(const std::string& text, const Configuration& cfg,
                const std::vector<FeatureRef>& resolve_features, const FeatureRef& group_by,
                Collapse collapse, const std::optional<std::string>& base_context = {});

} // namespace gbd::query
