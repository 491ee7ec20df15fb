/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/extract.hpp"
#include "gbd/errors.hpp"
#include "gbd/job_pool.hpp"
#include "gbd/query.hpp"
#include "gbd/streams.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gbd {

void ExtractorRegistry::add(ExtractorDef def) {
    if (find(def.name)) {
        throw DataError("extractor '" + def.name + "' is already registered");
    }
    extractors_.push_back(std::move(def));
}

const ExtractorDef* ExtractorRegistry::find(const std::string& name) const {
    for (const ExtractorDef& def : extractors_) {
        if (def.name == name) return &def;
    }
    return nullptr;
}

const ExtractorDef& ExtractorRegistry::get(const std::string& name) const {
    if (const ExtractorDef* def = find(name)) return *def;
    std::string available;
    for (const ExtractorDef& def : extractors_) {
        if (!available.empty()) available += ", ";
        available += def.name;
    }
    throw DataError("unknown extractor '" + name + "' (available: " + available + ")");
}

namespace {

std::string fixed_2dp(double v) {
    long long scaled = std::llround(v * 100.0); // half-up at 2 decimals
    std::string whole = std::to_string(scaled / 100);
    long long frac = scaled % 100;
    if (frac < 0) frac = -frac;
    std::string out = whole + '.';
    if (frac < 10) out += '0';
    out += std::to_string(frac);
    return out;
}

constexpr const char* kDefault = "empty";

} // namespace

FeatureRecord base_features(const CnfInstance& instance) {
    std::set<int> variables;
    size_t literals = 0;
    size_t clause_size_max = 0;
    size_t horn = 0;
    size_t positive = 0;
    size_t negative = 0;
    for (const Clause& cl : instance.clauses) {
        size_t pos_in_clause = 0;
        clause_size_max = std::max(clause_size_max, cl.size());
        for (int lit : cl) {
            variables.insert(std::abs(lit));
            ++literals;
            if (lit > 0) {
                ++positive;
                ++pos_in_clause;
            } else {
                ++negative;
            }
        }
        if (pos_in_clause <= 1) ++horn;
    }
    double avg = instance.clauses.empty()
                     ? 0.0
                     : static_cast<double>(literals) / static_cast<double>(instance.clauses.size());
    return {
        {"variables", std::to_string(variables.size())},
        {"clauses", std::to_string(instance.clauses.size())},
        {"literals", std::to_string(literals)},
        {"clause_size_max", std::to_string(clause_size_max)},
        {"clause_size_avg", fixed_2dp(avg)},
        {"horn_clauses", std::to_string(horn)},
        {"positive_literals", std::to_string(positive)},
        {"negative_literals", std::to_string(negative)},
    };
}

ExtractorRegistry ExtractorRegistry::builtins() {
    ExtractorRegistry reg;
    reg.add({"base",
             {{"variables", kDefault},
              {"clauses", kDefault},
              {"literals", kDefault},
              {"clause_size_max", kDefault},
              {"clause_size_avg", kDefault},
              {"horn_clauses", kDefault},
              {"positive_literals", kDefault},
              {"negative_literals", kDefault}},
             {"cnf", "sancnf"},
             [](const std::filesystem::path& path) {
                 auto in = read_maybe_compressed(path);
                 return base_features(parse_cnf(*in, path.string()));
             }});
    reg.add({"isohash",
             {{"isohash", kDefault}},
             {"cnf", "sancnf"},
             [](const std::filesystem::path& path) {
                 auto in = read_maybe_compressed(path);
                 CnfInstance instance = parse_cnf(*in, path.string());
                 return FeatureRecord{{"isohash", isohash(instance).str()}};
             }});
    return reg;
}

const ExtractorRegistry& default_extractors() {
    static const ExtractorRegistry reg = ExtractorRegistry::builtins();
    return reg;
}

std::map<std::string, std::vector<std::string>> local_paths(const Configuration& cfg,
                                                            const std::string& context) {
    std::map<std::string, std::vector<std::string>> merged;
    for (const auto& src : cfg.sources()) {
        if (src->context() != context || !src->find_feature("local")) continue;
        for (auto& [hash, paths] : src->load("local")) {
            auto& dst = merged[hash];
            for (std::string& p : paths) {
                if (std::find(dst.begin(), dst.end(), p) == dst.end()) dst.push_back(std::move(p));
            }
        }
    }
    return merged;
}

RunReport init_local(Configuration& cfg, const std::string& target_source,
                     const std::filesystem::path& root, unsigned jobs) {
    NativeSource& target = cfg.native(target_source);
    const ContextDef& context = cfg.contexts().get(target.context());

    std::error_code ec;
    std::filesystem::recursive_directory_iterator it(root, ec);
    if (ec) {
        throw DataError(root.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        if (context.matches_filename(entry.path().filename().string())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end()); // directory iteration order is unspecified

    struct Task {
        InstanceId id;
        std::string error;
    };
    std::vector<Task> tasks(files.size());
    parallel_for(files.size(), jobs, [&](size_t i) {
        try {
            tasks[i].id = instance_hash(files[i], context);
        } catch (const std::exception& e) {
            tasks[i].error = e.what();
        }
    });

    RunReport report;
    std::set<std::string> distinct;
    NativeSource::Batch tx(target);
    target.ensure_feature("local", FeatureKind::OneToMany, "");
    target.ensure_feature("filename", FeatureKind::OneToMany, "");
    for (size_t i = 0; i < files.size(); ++i) {
        if (!tasks[i].error.empty()) {
            ++report.failed;
            report.messages.push_back(files[i].string() + ": " + tasks[i].error);
            continue;
        }
        const std::string& hash = tasks[i].id.str();
        target.set_value("local", files[i].string(), {hash});
        target.set_value("filename", files[i].filename().string(), {hash});
        distinct.insert(hash);
        ++report.processed;
    }
    tx.commit();
    report.registered = distinct.size();
    return report;
}

RunReport run_extractor(Configuration& cfg, const ExtractorRegistry& registry,
                        const std::string& extractor, const std::string& target_source,
                        const std::string& query_text, unsigned jobs) {
    const ExtractorDef& def = registry.get(extractor);
    NativeSource& target = cfg.native(target_source);
    if (std::find(def.contexts.begin(), def.contexts.end(), target.context()) ==
        def.contexts.end()) {
        throw DataError("extractor '" + def.name + "' does not apply to context '" +
                        target.context() + "'");
    }
    const std::string& context = target.context();

    query::ResultTable selected =
        query::run(query_text, cfg, {}, query::hash_group(), query::Collapse::None, context);
    auto locals = local_paths(cfg, context);

    struct Task {
        std::string hash;
        FeatureRecord record;
        std::string error;
        bool skipped = false;
    };
    std::vector<Task> tasks(selected.rows.size());
    for (size_t i = 0; i < selected.rows.size(); ++i) tasks[i].hash = selected.rows[i][0];

    parallel_for(tasks.size(), jobs, [&](size_t i) {
        Task& task = tasks[i];
        auto paths = locals.find(task.hash);
        if (paths == locals.end() || paths->second.empty()) {
            task.skipped = true;
            task.error = task.hash + ": no local path";
            return;
        }
        std::string last_error;
        for (const std::string& p : paths->second) {
            try {
                task.record = def.fn(p);
                return;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        task.error = task.hash + ": " + last_error;
    });

    RunReport report;
    NativeSource::Batch tx(target);
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
        for (const auto& [feature, value] : task.record) {
            target.set_value(feature, value, {task.hash});
        }
        ++report.processed;
    }
    tx.commit();
    return report;
}

} // namespace gbd
