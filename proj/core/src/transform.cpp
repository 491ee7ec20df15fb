/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/transform.hpp"
#include "gbd/errors.hpp"
#include "gbd/job_pool.hpp"
#include "gbd/query.hpp"
#include "gbd/streams.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gbd {

CnfInstance sanitize(const CnfInstance& instance, SanitizeStats* stats) {
    SanitizeStats local;
    CnfInstance out;
    std::set<std::set<int>> seen;
    for (const Clause& cl : instance.clauses) {
        Clause kept;
        std::set<int> lits;
        bool tautology = false;
        for (int lit : cl) {
            if (lits.count(-lit)) tautology = true;
            if (lits.insert(lit).second) {
                kept.push_back(lit);
            } else {
                ++local.removed_literals;
            }
        }
        if (tautology || !seen.insert(lits).second) {
            ++local.removed_clauses;
            continue;
        }
        out.clauses.push_back(std::move(kept));
    }
    out.num_vars_declared = out.max_var();
    if (stats) *stats = local;
    return out;
}

KisInstance cnf2kis(const CnfInstance& instance) {
    for (const Clause& cl : instance.clauses) {
        if (cl.empty()) {
            throw DataError("cnf2kis: formula contains an empty clause "
                            "(no vertex can represent it; the formula is trivially unsatisfiable)");
        }
    }
    KisInstance out;
    out.k = static_cast<int>(instance.clauses.size());

    // vertex numbering: clause-major, position-minor, 1-based
    std::vector<std::pair<int, size_t>> occ; // literal, clause index
    std::vector<size_t> clause_begin;
    for (size_t ci = 0; ci < instance.clauses.size(); ++ci) {
        clause_begin.push_back(occ.size());
        for (int lit : instance.clauses[ci]) occ.emplace_back(lit, ci);
    }
    out.num_vertices = static_cast<int>(occ.size());

    auto add_edge = [&](size_t a, size_t b) {
        int u = static_cast<int>(a) + 1;
        int v = static_cast<int>(b) + 1;
        if (u > v) std::swap(u, v);
        if (u != v) out.edges.emplace(u, v);
    };
    for (size_t ci = 0; ci < instance.clauses.size(); ++ci) {
        size_t begin = clause_begin[ci];
        size_t end = begin + instance.clauses[ci].size();
        for (size_t a = begin; a < end; ++a) {
            for (size_t b = a + 1; b < end; ++b) add_edge(a, b); // intra-clause clique
        }
    }
    for (size_t a = 0; a < occ.size(); ++a) {
        for (size_t b = a + 1; b < occ.size(); ++b) {
            if (occ[a].second != occ[b].second && occ[a].first == -occ[b].first) {
                add_edge(a, b); // complementary occurrences across clauses
            }
        }
    }
    return out;
}

void TransformerRegistry::add(TransformerDef def) {
    if (find(def.name)) {
        throw DataError("transformer '" + def.name + "' is already registered");
    }
    transformers_.push_back(std::move(def));
}

const TransformerDef* TransformerRegistry::find(const std::string& name) const {
    for (const TransformerDef& def : transformers_) {
        if (def.name == name) return &def;
    }
    return nullptr;
}

const TransformerDef& TransformerRegistry::get(const std::string& name) const {
    if (const TransformerDef* def = find(name)) return *def;
    std::string available;
    for (const TransformerDef& def : transformers_) {
        if (!available.empty()) available += ", ";
        available += def.name;
    }
    throw DataError("unknown transformer '" + name + "' (available: " + available + ")");
}

TransformerRegistry TransformerRegistry::builtins() {
    TransformerRegistry reg;
    reg.add({"sanitize",
             "cnf",
             "sancnf",
             {{"sanitization_changes", "empty"}},
             [](const CnfInstance& instance) {
                 SanitizeStats stats;
                 CnfInstance clean = sanitize(instance, &stats);
                 std::ostringstream os;
                 write_cnf(clean, os);
                 TransformOutput out;
                 out.serialized = os.str();
                 out.extra_features = {{"sanitization_changes",
                                        std::to_string(stats.removed_literals +
                                                       stats.removed_clauses)}};
                 return out;
             },
             [](const std::string& source_id, const std::string&) {
                 return source_id + ".sancnf.gz";
             }});
    reg.add({"cnf2kis",
             "cnf",
             "kis",
             {{"nodes", "empty"}, {"edges", "empty"}, {"k", "empty"}},
             [](const CnfInstance& instance) {
                 KisInstance kis = cnf2kis(instance);
                 std::ostringstream os;
                 write_kis(kis, os);
                 TransformOutput out;
                 out.serialized = os.str();
                 out.extra_features = {{"nodes", std::to_string(kis.num_vertices)},
                                       {"edges", std::to_string(kis.edges.size())},
                                       {"k", std::to_string(kis.k)}};
                 return out;
             },
             [](const std::string& source_id, const std::string&) {
                 return source_id + ".kis.gz";
             }});
    return reg;
}

const TransformerRegistry& default_transformers() {
    static const TransformerRegistry reg = TransformerRegistry::builtins();
    return reg;
}

RunReport run_transformer(Configuration& cfg, const TransformerRegistry& registry,
                          const std::string& transformer, const std::string& source_context,
                          const std::string& target_source, const std::string& query_text,
                          unsigned jobs, const std::optional<std::filesystem::path>& outdir) {
    const TransformerDef& def = registry.get(transformer);
    if (source_context != def.source_context) {
        throw DataError("transformer '" + def.name + "' transforms context '" +
                        def.source_context + "', not '" + source_context + "'");
    }
    NativeSource& target = cfg.native(target_source);
    if (target.context() != def.target_context) {
        throw DataError("target source '" + target_source + "' is bound to context '" +
                        target.context() + "' but transformer '" + def.name + "' produces '" +
                        def.target_context + "'");
    }
    const ContextDef& target_ctx = cfg.contexts().get(def.target_context);

    std::filesystem::path dir = outdir.value_or(target.path().parent_path());
    if (dir.empty()) dir = ".";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec && !std::filesystem::is_directory(dir)) {
        throw DataError(dir.string() + ": cannot create output directory");
    }

    query::ResultTable selected = query::run(query_text, cfg, {}, query::hash_group(),
                                             query::Collapse::None, def.source_context);
    auto locals = local_paths(cfg, def.source_context);

    struct Task {
        std::string source_id;
        std::string out_name;
        std::string target_id;
        FeatureRecord extras;
        std::string error;
        bool skipped = false;
    };
    std::vector<Task> tasks(selected.rows.size());
    for (size_t i = 0; i < tasks.size(); ++i) tasks[i].source_id = selected.rows[i][0];

    parallel_for(tasks.size(), jobs, [&](size_t i) {
        Task& task = tasks[i];
        auto paths = locals.find(task.source_id);
        if (paths == locals.end() || paths->second.empty()) {
            task.skipped = true;
            task.error = task.source_id + ": no local path";
            return;
        }
        std::string last_error;
        for (const std::string& p : paths->second) {
            try {
                auto in = read_maybe_compressed(p);
                CnfInstance instance = parse_cnf(*in, p);
                std::filesystem::path source_file(p);
                TransformOutput output = def.fn(instance);
                task.out_name = def.name_fn(task.source_id, source_file.filename().string());
                std::filesystem::path out_path = dir / task.out_name;
                {
                    auto os = write_maybe_compressed(out_path);
                    os->write(output.serialized.data(),
                              static_cast<std::streamsize>(output.serialized.size()));
                }
                task.target_id = instance_hash(out_path, target_ctx).str();
                task.extras = std::move(output.extra_features);
                return;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        task.error = task.source_id + ": " + last_error;
    });

    RunReport report;
    std::string mapping_feature = "to_" + def.target_context;
    NativeSource::Batch tx(target);
    target.ensure_feature("local", FeatureKind::OneToMany, "");
    target.ensure_feature("filename", FeatureKind::OneToMany, "");
    target.ensure_feature(mapping_feature, FeatureKind::OneToMany, "");
    for (const ProvidedFeature& f : def.provided) {
        target.ensure_feature(f.name, FeatureKind::OneToOne, f.default_value);
    }
    for (const Task& task : tasks) {
        if (task.skipped) {
            ++report.skipped;
            report.messages.push_back(task.error);
            continue;
        }
        if (!task.error.empty()) {
            ++report.failed;
            report.messages.push_back(task.error);
            continue;
        }
        std::string out_path = (dir / task.out_name).string();
        target.set_value("local", out_path, {task.target_id});
        target.set_value("filename", task.out_name, {task.target_id});
        target.set_value(mapping_feature, task.target_id, {task.source_id});
        for (const auto& [feature, value] : task.extras) {
            target.set_value(feature, value, {task.target_id});
        }
        ++report.processed;
    }
    tx.commit();
    return report;
}

} // namespace gbd
