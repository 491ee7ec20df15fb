/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include "gbd/formats.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gbd {

// Context-scoped primary key: 32-char lowercase hex digest of the
// normalized token stream. Equal digests identify equal instances up to
// comments, header, whitespace, and compression container.
class InstanceId {
public:
    InstanceId() = default;
    explicit InstanceId(std::string hex) : hex_(std::move(hex)) {}

    const std::string& str() const { return hex_; }
    bool empty() const { return hex_.empty(); }

    static bool looks_valid(std::string_view s);

    friend auto operator<=>(const InstanceId&, const InstanceId&) = default;

private:
    std::string hex_;
};

// A registrable problem-domain format: name, identification function,
// filename extensions used to locate instances on disk.
struct ContextDef {
    std::string name;
    std::vector<std::string> extensions;
    std::function<InstanceId(const std::filesystem::path&)> id_fn;

    bool matches_filename(const std::string& filename) const;
};

class ContextRegistry {
public:
    // registers; duplicate names raise DataError
    void add(ContextDef def);

    const ContextDef& get(const std::string& name) const; // DataError when absent
    const ContextDef* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    // registration order
    const std::vector<ContextDef>& all() const { return contexts_; }

    static constexpr const char* kDefaultContext = "cnf";

    // cnf, sancnf, kis
    static ContextRegistry builtins();

private:
    std::vector<ContextDef> contexts_;
};

// Process-wide registry, initialized with the builtins on first use and
// read-only afterwards.
const ContextRegistry& default_contexts();

// Identification function for cnf/sancnf files: digest over the token
// stream with comments and header removed, tokens joined by single
// spaces. Transparent to compression containers.
InstanceId cnf_instance_hash(const std::filesystem::path& path);

// Identification for kis graph files: same construction with comment
// lines removed (header tokens participate).
InstanceId kis_instance_hash(const std::filesystem::path& path);

// Dispatch through a context definition.
InstanceId instance_hash(const std::filesystem::path& path, const ContextDef& context);

// Isomorphism-over-approximating hash: digest of the sorted multiset of
// per-variable occurrence pairs (max, min) over positive/negative counts,
// encoded as space-joined decimals. Invariant under variable renaming and
// per-variable polarity flips; deliberately coarse (collisions between
// non-isomorphic formulas exist).
InstanceId isohash(const CnfInstance& instance);

} // namespace gbd
