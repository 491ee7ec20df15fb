/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include "gbd/formats.hpp"
#include "gbd/store.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gbd {

struct ProvidedFeature {
    std::string name;
    std::string default_value;
};

using FeatureRecord = std::vector<std::pair<std::string, std::string>>;

// A named feature extractor: declares its features up front and is bound
// to the contexts it can run on.
struct ExtractorDef {
    std::string name;
    std::vector<ProvidedFeature> provided;
    std::vector<std::string> contexts;
    std::function<FeatureRecord(const std::filesystem::path&)> fn;
};

class ExtractorRegistry {
public:
    void add(ExtractorDef def);
    const ExtractorDef* find(const std::string& name) const;
    const ExtractorDef& get(const std::string& name) const; // lists available on miss
    const std::vector<ExtractorDef>& all() const { return extractors_; }

    static ExtractorRegistry builtins(); // base, isohash

private:
    std::vector<ExtractorDef> extractors_;
};

const ExtractorRegistry& default_extractors();

struct RunReport {
    size_t processed = 0;
    size_t skipped = 0;
    size_t failed = 0;
    size_t registered = 0; // distinct instance ids (init local)
    std::vector<std::string> messages;
};

// Recursively registers every file under root matching the target
// context's extensions: hashes it and accumulates the reserved local and
// filename features. Identical token streams collapse to one instance.
RunReport init_local(Configuration& cfg, const std::string& target_source,
                     const std::filesystem::path& root, unsigned jobs);

// Runs a registered extractor over the instances selected by the query
// (empty query: all instances of the target's context). Instance-level
// work runs on the pool; writes are applied in deterministic order in a
// single transaction.
RunReport run_extractor(Configuration& cfg, const ExtractorRegistry& registry,
                        const std::string& extractor, const std::string& target_source,
                        const std::string& query_text, unsigned jobs);

// The 8 structural cnf features written by the "base" extractor.
FeatureRecord base_features(const CnfInstance& instance);

// Per-instance local paths, merged across every source of the context in
// configuration order.
std::map<std::string, std::vector<std::string>> local_paths(const Configuration& cfg,
                                                            const std::string& context);

} // namespace gbd
