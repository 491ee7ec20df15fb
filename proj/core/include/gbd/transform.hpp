/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include "gbd/extract.hpp"
#include "gbd/formats.hpp"
#include "gbd/store.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace gbd {

struct SanitizeStats {
    size_t removed_literals = 0;
    size_t removed_clauses = 0;
};

// Syntactic normalization: duplicate literals within a clause removed
// (first kept), tautological clauses removed, duplicate clauses removed
// (clause identity = literal set, first kept), original order otherwise
// preserved. Variables are not renumbered. Idempotent.
CnfInstance sanitize(const CnfInstance& instance, SanitizeStats* stats = nullptr);

// Reduction from satisfiability to k-independent-set on the clause
// occurrence graph: one vertex per literal occurrence (clause-major,
// 1-based), cliques within clauses, edges between complementary
// occurrences of different clauses, k = clause count. The formula is
// satisfiable iff the graph has an independent set of size k. Refuses
// formulas containing an empty clause.
KisInstance cnf2kis(const CnfInstance& instance);

struct TransformOutput {
    std::string serialized; // uncompressed target instance bytes
    FeatureRecord extra_features;
};

struct TransformerDef {
    std::string name;
    std::string source_context;
    std::string target_context;
    std::vector<ProvidedFeature> provided;
    std::function<TransformOutput(const CnfInstance&)> fn;
    // output filename for a transformed instance (runner appends nothing)
    std::function<std::string(const std::string& source_id, const std::string& source_filename)>
        name_fn;
};

class TransformerRegistry {
public:
    void add(TransformerDef def);
    const TransformerDef* find(const std::string& name) const;
    const TransformerDef& get(const std::string& name) const;
    const std::vector<TransformerDef>& all() const { return transformers_; }

    static TransformerRegistry builtins(); // sanitize, cnf2kis

private:
    std::vector<TransformerDef> transformers_;
};

const TransformerRegistry& default_transformers();

// Transforms the instances selected by the query in the source context:
// writes one gz-compressed instance file per source instance into outdir
// (default: next to the target database), hashes it with the target
// context's identification function, and records local/filename plus the
// to_{target} mapping (source id -> target id) and the transformer's
// extra features in the target source.
RunReport run_transformer(Configuration& cfg, const TransformerRegistry& registry,
                          const std::string& transformer, const std::string& source_context,
                          const std::string& target_source, const std::string& query_text,
                          unsigned jobs,
                          const std::optional<std::filesystem::path>& outdir = {});

} // namespace gbd
