/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/errors.hpp"
#include "gbd/query.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace gbd::query {

namespace {

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string render_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

bool cmp_double(double l, Cmp op, double r) {
    switch (op) {
    case Cmp::Eq: return l == r;
    case Cmp::Ne: return l != r;
    case Cmp::Lt: return l < r;
    case Cmp::Gt: return l > r;
    case Cmp::Le: return l <= r;
    case Cmp::Ge: return l >= r;
    default: return false;
    }
}

bool cmp_order(int c, Cmp op) {
    switch (op) {
    case Cmp::Eq: return c == 0;
    case Cmp::Ne: return c != 0;
    case Cmp::Lt: return c < 0;
    case Cmp::Gt: return c > 0;
    case Cmp::Le: return c <= 0;
    case Cmp::Ge: return c >= 0;
    default: return false;
    }
}

// numeric when both sides parse as numbers, byte-wise otherwise
bool compare_values(const std::string& l, Cmp op, const std::string& r) {
    auto ln = parse_number(l);
    auto rn = parse_number(r);
    if (ln && rn) return cmp_double(*ln, op, *rn);
    return cmp_order(l.compare(r), op);
}

bool pattern_match(const std::string& value, const Rhs& rhs) {
    if (rhs.kind == Rhs::Kind::Text) return value == rhs.text;
    const std::string& p = rhs.text;
    if (rhs.percent_before && rhs.percent_after) {
        return value.find(p) != std::string::npos;
    }
    if (rhs.percent_before) return value.size() >= p.size() && value.ends_with(p);
    return value.size() >= p.size() && value.starts_with(p);
}

MappingRoute find_route(const Configuration& cfg, const std::string& base,
                        const std::string& target) {
    std::string forward_name = "to_" + target;
    std::string backward_name = "to_" + base;
    const auto& sources = cfg.sources();
    for (size_t i = 0; i < sources.size(); ++i) {
        if (sources[i]->find_feature(forward_name)) {
            return {static_cast<int>(i), forward_name, true};
        }
        if (sources[i]->find_feature(backward_name)) {
            return {static_cast<int>(i), backward_name, false};
        }
    }
    throw DataError("no context mapping between '" + base + "' and '" + target +
                    "' (expected a " + forward_name + " or " + backward_name + " feature)");
}

class Resolver {
public:
    Resolver(const Configuration& cfg, Plan& plan) : cfg_(cfg), plan_(plan) {}

    void bind(const FeatureRef& ref) {
        std::string key = ref.display();
        if (plan_.features.count(key)) return;
        plan_.features.emplace(key, resolve_ref(ref));
    }

    void bind_ast(const Node& node) {
        switch (node.kind) {
        case Node::Kind::MatchAll:
            return;
        case Node::Kind::And:
        case Node::Kind::Or:
            bind_ast(*node.lhs);
            bind_ast(*node.rhs);
            return;
        case Node::Kind::Constraint:
            bind(node.constraint.ref);
            if (node.constraint.rhs.kind == Rhs::Kind::Term) {
                bind_term(*node.constraint.rhs.term);
            }
            return;
        }
    }

private:
    void bind_term(const Term& t) {
        switch (t.kind) {
        case Term::Kind::Number:
            return;
        case Term::Kind::Feature:
            bind(t.ref);
            return;
        case Term::Kind::Binary:
            bind_term(*t.lhs);
            bind_term(*t.rhs);
            return;
        }
    }

    int source_index(const DataSource* src) const {
        const auto& sources = cfg_.sources();
        for (size_t i = 0; i < sources.size(); ++i) {
            if (sources[i].get() == src) return static_cast<int>(i);
        }
        return -1;
    }

    ResolvedFeature resolve_ref(const FeatureRef& ref) {
        ResolvedFeature rf;
        rf.display = ref.display();
        if (ref.name == "hash") {
            rf.is_hash = true;
            std::string ctx =
                ref.source ? cfg_.source(*ref.source).context() : plan_.base_context;
            if (ctx != plan_.base_context) {
                rf.foreign = true;
                rf.route = find_route(cfg_, plan_.base_context, ctx);
            }
            return rf;
        }
        const DataSource* src;
        if (ref.source) {
            src = &cfg_.source(*ref.source);
            if (!src->find_feature(ref.name)) {
                throw DataError("unknown feature '" + ref.name + "' in source '" + *ref.source + "'");
            }
        } else {
            src = cfg_.first_providing(ref.name);
            if (!src) throw DataError("unknown feature '" + ref.name + "'");
        }
        rf.source_index = source_index(src);
        rf.def = *src->find_feature(ref.name);

        if (auto target = mapping_target(ref.name, cfg_.contexts())) {
            // mapping features resolve directly in either direction
            rf.is_mapping = true;
            rf.mapping_inverted = (*target == plan_.base_context);
            return rf;
        }
        if (rf.def.context != plan_.base_context) {
            rf.foreign = true;
            rf.route = find_route(cfg_, plan_.base_context, rf.def.context);
        }
        return rf;
    }

    const Configuration& cfg_;
    Plan& plan_;
};

struct Relation {
    FeatureKind kind = FeatureKind::OneToMany;
    std::string default_value;
    FeatureValues rows;
    std::map<std::string, std::vector<std::string>> inverted;
    bool inverted_built = false;
};

class Engine {
public:
    Engine(const Plan& plan, const Configuration& cfg) : plan_(plan), cfg_(cfg) {}

    bool eval(const Node& node, const std::string& hash) {
        switch (node.kind) {
        case Node::Kind::MatchAll:
            return true;
        case Node::Kind::And:
            return eval(*node.lhs, hash) && eval(*node.rhs, hash);
        case Node::Kind::Or:
            return eval(*node.lhs, hash) || eval(*node.rhs, hash);
        case Node::Kind::Constraint:
            return eval_constraint(node.constraint, hash);
        }
        return false;
    }

    // Multiset of values the reference takes for this instance. One-to-one
    // features always contribute their value or default; one-to-many may
    // be empty; foreign features contribute across all mapped ids.
    std::vector<std::string> value_set(const std::string& hash, const ResolvedFeature& rf) {
        if (rf.is_hash) {
            if (!rf.foreign) return {hash};
            return mapped_ids(hash, rf.route);
        }
        if (rf.is_mapping) {
            Relation& r = relation(rf.source_index, rf.def.name);
            if (!rf.mapping_inverted) return direct_values(r, hash);
            build_inverted(r);
            auto it = r.inverted.find(hash);
            return it == r.inverted.end() ? std::vector<std::string>{} : it->second;
        }
        if (!rf.foreign) {
            Relation& r = relation(rf.source_index, rf.def.name);
            return own_values(r, hash);
        }
        std::vector<std::string> out;
        Relation& r = relation(rf.source_index, rf.def.name);
        for (const std::string& m : mapped_ids(hash, rf.route)) {
            for (std::string& v : own_values(r, m)) out.push_back(std::move(v));
        }
        return out;
    }

private:
    bool eval_constraint(const Constraint& c, const std::string& hash) {
        const ResolvedFeature& rf = plan_.features.at(c.ref.display());
        std::vector<std::string> values = value_set(hash, rf);
        if (c.op == Cmp::Like || c.op == Cmp::Unlike) {
            bool any = std::any_of(values.begin(), values.end(),
                                   [&](const std::string& v) { return pattern_match(v, c.rhs); });
            return c.op == Cmp::Like ? any : !any;
        }
        if (c.rhs.kind == Rhs::Kind::Text) {
            return std::any_of(values.begin(), values.end(), [&](const std::string& v) {
                return compare_values(v, c.op, c.rhs.text);
            });
        }
        // term right-hand sides evaluate numerically
        std::optional<double> rhs = eval_term(*c.rhs.term, hash);
        if (!rhs) return false;
        return std::any_of(values.begin(), values.end(), [&](const std::string& v) {
            auto vn = parse_number(v);
            return vn && cmp_double(*vn, c.op, *rhs);
        });
    }

    std::optional<double> eval_term(const Term& t, const std::string& hash) {
        switch (t.kind) {
        case Term::Kind::Number:
            return t.number_value;
        case Term::Kind::Feature: {
            const ResolvedFeature& rf = plan_.features.at(t.ref.display());
            std::vector<std::string> values = value_set(hash, rf);
            if (values.size() != 1) return std::nullopt;
            return parse_number(values[0]);
        }
        case Term::Kind::Binary: {
            auto l = eval_term(*t.lhs, hash);
            auto r = eval_term(*t.rhs, hash);
            if (!l || !r) return std::nullopt;
            switch (t.op) {
            case ArithOp::Add: return *l + *r;
            case ArithOp::Sub: return *l - *r;
            case ArithOp::Mul: return *l * *r;
            case ArithOp::Div:
                if (*r == 0.0) return std::nullopt; // constraint false, not an error
                return *l / *r;
            }
            return std::nullopt;
        }
        }
        return std::nullopt;
    }

    Relation& relation(int source_index, const std::string& feature) {
        auto key = std::make_pair(source_index, feature);
        auto it = relations_.find(key);
        if (it != relations_.end()) return it->second;
        const DataSource& src = *cfg_.sources().at(static_cast<size_t>(source_index));
        Relation rel;
        FeatureDef def = *src.find_feature(feature);
        rel.kind = def.kind;
        rel.default_value = def.default_value;
        rel.rows = src.load(feature);
        return relations_.emplace(key, std::move(rel)).first->second;
    }

    void build_inverted(Relation& r) {
        if (r.inverted_built) return;
        for (const auto& [key, values] : r.rows) {
            for (const std::string& v : values) r.inverted[v].push_back(key);
        }
        r.inverted_built = true;
    }

    static std::vector<std::string> direct_values(Relation& r, const std::string& hash) {
        auto it = r.rows.find(hash);
        return it == r.rows.end() ? std::vector<std::string>{} : it->second;
    }

    // value-or-default for one-to-one, stored set for one-to-many
    static std::vector<std::string> own_values(Relation& r, const std::string& hash) {
        auto it = r.rows.find(hash);
        if (it != r.rows.end()) return it->second;
        if (r.kind == FeatureKind::OneToOne) return {r.default_value};
        return {};
    }

    std::vector<std::string> mapped_ids(const std::string& hash, const MappingRoute& route) {
        Relation& r = relation(route.source_index, route.feature);
        if (route.forward) return direct_values(r, hash);
        build_inverted(r);
        auto it = r.inverted.find(hash);
        return it == r.inverted.end() ? std::vector<std::string>{} : it->second;
    }

    const Plan& plan_;
    const Configuration& cfg_;
    std::map<std::pair<int, std::string>, Relation> relations_;
};

std::string collapse_cell(const std::vector<std::string>& values, Collapse collapse,
                          const std::string& column) {
    switch (collapse) {
    case Collapse::None: {
        std::vector<std::string> distinct(values);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::string out;
        for (size_t i = 0; i < distinct.size(); ++i) {
            if (i) out += ' ';
            out += distinct[i];
        }
        return out;
    }
    case Collapse::Count:
        return std::to_string(values.size());
    case Collapse::Avg: {
        if (values.empty()) return "";
        double sum = 0.0;
        for (const std::string& v : values) {
            auto n = parse_number(v);
            if (!n) {
                throw DataError("collapse avg over non-numeric value '" + v + "' in column '" +
                                column + "'");
            }
            sum += *n;
        }
        return render_double(sum / static_cast<double>(values.size()));
    }
    case Collapse::Min:
    case Collapse::Max: {
        if (values.empty()) return "";
        std::vector<double> nums;
        nums.reserve(values.size());
        bool all_numeric = true;
        for (const std::string& v : values) {
            auto n = parse_number(v);
            if (!n) {
                all_numeric = false;
                break;
            }
            nums.push_back(*n);
        }
        const std::string* best = &values[0];
        if (all_numeric) {
            double best_num = nums[0];
            for (size_t i = 1; i < values.size(); ++i) {
                bool better = collapse == Collapse::Min ? nums[i] < best_num : nums[i] > best_num;
                bool tie_break = nums[i] == best_num && values[i] < *best;
                if (better || tie_break) {
                    best_num = nums[i];
                    best = &values[i];
                }
            }
        } else {
            for (size_t i = 1; i < values.size(); ++i) {
                bool better = collapse == Collapse::Min ? values[i] < *best : values[i] > *best;
                if (better) best = &values[i];
            }
        }
        return *best;
    }
    }
    return "";
}

} // namespace

Plan resolve(Ast ast, const Configuration& cfg, const std::vector<FeatureRef>& resolve_features,
             const FeatureRef& group_by, const std::optional<std::string>& base_context) {
    Plan plan;
    plan.ast = std::move(ast);

    // base context: explicit override, else the group key decides it
    if (base_context) {
        plan.base_context = *base_context;
    } else if (group_by.name == "hash") {
        if (group_by.source) {
            plan.base_context = cfg.source(*group_by.source).context();
        } else if (!cfg.sources().empty()) {
            plan.base_context = cfg.sources().front()->context();
        } else {
            plan.base_context = ContextRegistry::kDefaultContext;
        }
    } else {
        const DataSource* src = group_by.source ? &cfg.source(*group_by.source)
                                                : cfg.first_providing(group_by.name);
        if (!src || !src->find_feature(group_by.name)) {
            throw DataError("unknown group feature '" + group_by.display() + "'");
        }
        plan.base_context = src->context();
    }

    Resolver resolver(cfg, plan);
    resolver.bind(group_by);
    plan.group_column = group_by.display();
    if (plan.ast.root) resolver.bind_ast(*plan.ast.root);
    for (const FeatureRef& ref : resolve_features) {
        resolver.bind(ref);
        plan.resolve_columns.push_back(ref.display());
    }
    return plan;
}

ResultTable execute(const Plan& plan, const Configuration& cfg, Collapse collapse) {
    Engine engine(plan, cfg);

    // universe: every hash known to any source of the base context
    std::set<std::string> universe;
    for (const auto& src : cfg.sources()) {
        if (src->context() != plan.base_context) continue;
        for (std::string& h : src->known_hashes()) universe.insert(std::move(h));
    }

    const ResolvedFeature& group_rf = plan.features.at(plan.group_column);
    std::map<std::string, std::vector<std::string>> groups;
    for (const std::string& hash : universe) {
        if (!engine.eval(*plan.ast.root, hash)) continue;
        std::vector<std::string> keys = engine.value_set(hash, group_rf);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        for (const std::string& key : keys) groups[key].push_back(hash);
    }

    ResultTable table;
    table.columns.push_back(plan.group_column);
    for (const std::string& col : plan.resolve_columns) table.columns.push_back(col);

    for (const auto& [key, hashes] : groups) {
        std::vector<std::string> row;
        row.push_back(key);
        for (const std::string& col : plan.resolve_columns) {
            const ResolvedFeature& rf = plan.features.at(col);
            std::vector<std::string> cell;
            for (const std::string& hash : hashes) {
                for (std::string& v : engine.value_set(hash, rf)) cell.push_back(std::move(v));
            }
            row.push_back(collapse_cell(cell, collapse, col));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable run(const std::string& text, const Configuration& cfg,
                const std::vector<FeatureRef>& resolve_features, const FeatureRef& group_by,
                Collapse collapse, const std::optional<std::string>& base_context) {
    Plan plan = resolve(parse_query(text), cfg, resolve_features, group_by, base_context);
    return execute(plan, cfg, collapse);
}

} // namespace gbd::query
