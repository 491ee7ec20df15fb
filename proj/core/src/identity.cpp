/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/identity.hpp"
#include "gbd/digest.hpp"
#include "gbd/errors.hpp"
#include "gbd/streams.hpp"

#include <algorithm>
#include <map>

namespace gbd {

bool InstanceId::looks_valid(std::string_view s) {
    if (s.size() != 32) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

bool ContextDef::matches_filename(const std::string& filename) const {
    for (const std::string& ext : extensions) {
        if (filename.size() > ext.size() && filename.ends_with(ext)) return true;
    }
    return false;
}

void ContextRegistry::add(ContextDef def) {
    if (find(def.name)) {
        throw DataError("context '" + def.name + "' is already registered");
    }
    if (def.extensions.empty()) {
        throw DataError("context '" + def.name + "' must declare filename extensions");
    }
    contexts_.push_back(std::move(def));
}

const ContextDef& ContextRegistry::get(const std::string& name) const {
    if (const ContextDef* def = find(name)) return *def;
    throw DataError("unknown context '" + name + "'");
}

const ContextDef* ContextRegistry::find(const std::string& name) const {
    for (const ContextDef& def : contexts_) {
        if (def.name == name) return &def;
    }
    return nullptr;
}

namespace {

std::vector<std::string> with_containers(const std::string& base) {
    return {base, base + ".gz", base + ".xz", base + ".bz2"};
}

InstanceId hash_tokens(const std::filesystem::path& path, TokenFilter filter) {
    auto in = read_maybe_compressed(path);
    Md5 md;
    bool first = true;
    for_each_token(*in, filter, [&](std::string_view tok) {
        if (!first) md.update(' ');
        md.update(tok);
        first = false;
    });
    return InstanceId(md.hex());
}

} // namespace

ContextRegistry ContextRegistry::builtins() {
    ContextRegistry reg;
    reg.add({"cnf", with_containers(".cnf"), cnf_instance_hash});
    reg.add({"sancnf", with_containers(".sancnf"), cnf_instance_hash});
    reg.add({"kis", with_containers(".kis"), kis_instance_hash});
    return reg;
}

const ContextRegistry& default_contexts() {
    static const ContextRegistry reg = ContextRegistry::builtins();
    return reg;
}

InstanceId cnf_instance_hash(const std::filesystem::path& path) {
    return hash_tokens(path, TokenFilter::StripCommentsAndHeader);
}

InstanceId kis_instance_hash(const std::filesystem::path& path) {
    return hash_tokens(path, TokenFilter::StripComments);
}

InstanceId instance_hash(const std::filesystem::path& path, const ContextDef& context) {
    return context.id_fn(path);
}

InstanceId isohash(const CnfInstance& instance) {
    // degree pair per occurring variable, polarity-normalized to (max, min)
    std::map<int, std::pair<long long, long long>> degrees;
    for (const Clause& cl : instance.clauses) {
        for (int lit : cl) {
            auto& [pos, neg] = degrees[std::abs(lit)];
            (lit > 0 ? pos : neg) += 1;
        }
    }
    std::vector<std::pair<long long, long long>> signature;
    signature.reserve(degrees.size());
    for (const auto& [var, d] : degrees) {
        signature.emplace_back(std::max(d.first, d.second), std::min(d.first, d.second));
    }
    std::sort(signature.begin(), signature.end());

    Md5 md;
    bool first = true;
    for (const auto& [hi, lo] : signature) {
        std::string part = std::to_string(hi) + ' ' + std::to_string(lo);
        if (!first) md.update(' ');
        md.update(part);
        first = false;
    }
    return InstanceId(md.hex());
}

} // namespace gbd
