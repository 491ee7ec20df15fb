/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/store.hpp"
#include "gbd/csv.hpp"
#include "gbd/errors.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace gbd {

const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::OneToOne ? "one" : "many";
}

bool is_legal_feature_name(std::string_view name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    return std::all_of(name.begin() + 1, name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::optional<std::string> mapping_target(std::string_view feature, const ContextRegistry& contexts) {
    if (!feature.starts_with("to_")) return std::nullopt;
    std::string target(feature.substr(3));
    if (!contexts.contains(target)) return std::nullopt;
    return target;
}

namespace {

constexpr const char* kHashColumn = "hash";

bool is_reserved_many(const std::string& name) {
    return name == "local" || name == "filename";
}

void check_creatable(const std::string& name, FeatureKind kind, const ContextRegistry& contexts) {
    if (!is_legal_feature_name(name)) {
        throw DataError("illegal feature name '" + name + "'");
    }
    if (name == kHashColumn) {
        throw DataError("'hash' is the instance key, not a feature");
    }
    if (kind != FeatureKind::OneToMany &&
        (is_reserved_many(name) || mapping_target(name, contexts))) {
        throw DataError("reserved feature '" + name + "' must be one-to-many");
    }
}

// ----------------------------------------------------------------- sqlite

class Stmt {
public:
    Stmt(sqlite3* db, const std::string& sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
            throw DataError(std::string("database error: ") + sqlite3_errmsg(db));
        }
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int idx, const std::string& text) {
        if (sqlite3_bind_text(stmt_, idx, text.c_str(), static_cast<int>(text.size()),
                              SQLITE_TRANSIENT) != SQLITE_OK) {
            throw DataError(std::string("database error: ") + sqlite3_errmsg(db_));
        }
        return *this;
    }

    // true while a row is available
    bool step() {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw DataError(std::string("database error: ") + sqlite3_errmsg(db_));
    }

    std::string text(int col) const {
        const unsigned char* p = sqlite3_column_text(stmt_, col);
        return p ? reinterpret_cast<const char*>(p) : "";
    }

    void run() {
        while (step()) {
        }
    }

    void reset() {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

std::string feature_table(const std::string& feature) {
    return "\"ft_" + feature + "\"";
}

} // namespace

// --------------------------------------------------------------- native

NativeSource::NativeSource(std::string name, std::string context, std::filesystem::path path,
                           bool create)
    : DataSource(std::move(name), std::move(context), std::move(path)) {
    if (!create && !std::filesystem::exists(path_)) {
        throw DataError(path_.string() + ": data source does not exist");
    }
    int flags = SQLITE_OPEN_READWRITE | (create ? SQLITE_OPEN_CREATE : 0);
    if (sqlite3_open_v2(path_.string().c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "cannot open";
        sqlite3_close(db_);
        throw DataError(path_.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 30000);
    try {
        Stmt(db_, "CREATE TABLE IF NOT EXISTS feature_catalog ("
                  " name TEXT PRIMARY KEY,"
                  " kind TEXT NOT NULL CHECK (kind IN ('one','many')),"
                  " default_value TEXT NOT NULL DEFAULT '')")
            .run();
    } catch (...) {
        sqlite3_close(db_);
        throw;
    }
}

NativeSource::~NativeSource() {
    sqlite3_close(db_);
}

void NativeSource::begin() {
    if (tx_depth_++ == 0) Stmt(db_, "BEGIN IMMEDIATE").run();
}

void NativeSource::commit_tx() {
    if (--tx_depth_ == 0) Stmt(db_, "COMMIT").run();
}

void NativeSource::rollback() {
    if (--tx_depth_ == 0) {
        try {
            Stmt(db_, "ROLLBACK").run();
        } catch (...) {
        }
    }
}

NativeSource::Batch::Batch(NativeSource& source) : source_(source), open_(true) {
    source_.begin();
}

NativeSource::Batch::~Batch() {
    if (open_) source_.rollback();
}

void NativeSource::Batch::commit() {
    source_.commit_tx();
    open_ = false;
}

std::vector<FeatureDef> NativeSource::features() const {
    std::vector<FeatureDef> out;
    Stmt st(db_, "SELECT name, kind, default_value FROM feature_catalog ORDER BY name");
    while (st.step()) {
        FeatureDef def;
        def.name = st.text(0);
        def.kind = st.text(1) == "one" ? FeatureKind::OneToOne : FeatureKind::OneToMany;
        def.default_value = st.text(2);
        def.source_name = name_;
        def.context = context_;
        out.push_back(std::move(def));
    }
    return out;
}

std::optional<FeatureDef> NativeSource::find_feature(const std::string& feature) const {
    Stmt st(db_, "SELECT kind, default_value FROM feature_catalog WHERE name = ?1");
    st.bind(1, feature);
    if (!st.step()) return std::nullopt;
    FeatureDef def;
    def.name = feature;
    def.kind = st.text(0) == "one" ? FeatureKind::OneToOne : FeatureKind::OneToMany;
    def.default_value = st.text(1);
    def.source_name = name_;
    def.context = context_;
    return def;
}

FeatureDef NativeSource::require_feature(const std::string& feature) const {
    if (auto def = find_feature(feature)) return *def;
    throw DataError("unknown feature '" + feature + "' in source '" + name_ + "'");
}

FeatureValues NativeSource::load(const std::string& feature) const {
    require_feature(feature);
    FeatureValues out;
    Stmt st(db_, "SELECT hash, value FROM " + feature_table(feature) + " ORDER BY hash, value");
    while (st.step()) {
        out[st.text(0)].push_back(st.text(1));
    }
    return out;
}

std::vector<std::string> NativeSource::known_hashes() const {
    std::set<std::string> hashes;
    for (const FeatureDef& def : features()) {
        Stmt st(db_, "SELECT DISTINCT hash FROM " + feature_table(def.name));
        while (st.step()) hashes.insert(st.text(0));
    }
    return {hashes.begin(), hashes.end()};
}

void NativeSource::create_feature(const std::string& feature, FeatureKind kind,
                                  const std::string& default_value) {
    if (find_feature(feature)) {
        throw DataError("feature '" + feature + "' already exists in source '" + name_ + "'");
    }
    Batch tx(*this);
    {
        Stmt st(db_, "INSERT INTO feature_catalog (name, kind, default_value) VALUES (?1, ?2, ?3)");
        st.bind(1, feature).bind(2, to_string(kind)).bind(3, default_value);
        st.run();
    }
    std::string schema = kind == FeatureKind::OneToOne
                             ? " (hash TEXT PRIMARY KEY, value TEXT NOT NULL) WITHOUT ROWID"
                             : " (hash TEXT NOT NULL, value TEXT NOT NULL,"
                               "  PRIMARY KEY (hash, value)) WITHOUT ROWID";
    Stmt(db_, "CREATE TABLE " + feature_table(feature) + schema).run();
    tx.commit();
}

void NativeSource::ensure_feature(const std::string& feature, FeatureKind kind,
                                  const std::string& default_value) {
    if (auto def = find_feature(feature)) {
        if (def->kind != kind) {
            throw DataError("feature '" + feature + "' exists in source '" + name_ +
                            "' with conflicting kind " + to_string(def->kind));
        }
        return;
    }
    create_feature(feature, kind, default_value);
}

size_t NativeSource::set_value(const std::string& feature, const std::string& value,
                               const std::vector<std::string>& hashes) {
    FeatureDef def = require_feature(feature);
    Batch tx(*this);
    std::string sql =
        def.kind == FeatureKind::OneToOne
            ? "INSERT INTO " + feature_table(feature) +
                  " (hash, value) VALUES (?1, ?2)"
                  " ON CONFLICT(hash) DO UPDATE SET value = excluded.value"
            : "INSERT OR IGNORE INTO " + feature_table(feature) + " (hash, value) VALUES (?1, ?2)";
    Stmt st(db_, sql);
    for (const std::string& hash : hashes) {
        st.bind(1, hash).bind(2, value);
        st.run();
        st.reset();
    }
    tx.commit();
    return hashes.size();
}

size_t NativeSource::clear_values(const std::string& feature, const std::vector<std::string>& hashes) {
    require_feature(feature);
    Batch tx(*this);
    Stmt st(db_, "DELETE FROM " + feature_table(feature) + " WHERE hash = ?1");
    for (const std::string& hash : hashes) {
        st.bind(1, hash);
        st.run();
        st.reset();
    }
    tx.commit();
    return hashes.size();
}

void NativeSource::delete_feature(const std::string& feature) {
    require_feature(feature);
    Batch tx(*this);
    {
        Stmt st(db_, "DELETE FROM feature_catalog WHERE name = ?1");
        st.bind(1, feature);
        st.run();
    }
    Stmt(db_, "DROP TABLE " + feature_table(feature)).run();
    tx.commit();
}

void NativeSource::rename_feature(const std::string& old_name, const std::string& new_name) {
    require_feature(old_name);
    if (find_feature(new_name)) {
        throw DataError("feature '" + new_name + "' already exists in source '" + name_ + "'");
    }
    Batch tx(*this);
    Stmt(db_, "ALTER TABLE " + feature_table(old_name) + " RENAME TO " + feature_table(new_name))
        .run();
    {
        Stmt st(db_, "UPDATE feature_catalog SET name = ?1 WHERE name = ?2");
        st.bind(1, new_name).bind(2, old_name);
        st.run();
    }
    tx.commit();
}

// ------------------------------------------------------------------ csv

CsvSource::CsvSource(std::string name, std::string context, std::filesystem::path path)
    : DataSource(std::move(name), std::move(context), std::move(path)) {
    std::ifstream in(path_);
    if (!in.is_open()) {
        throw DataError(path_.string() + ": cannot open for reading");
    }
    CsvTable table = read_csv(in, path_.string());
    int hash_col = table.column(kHashColumn);
    if (hash_col < 0) {
        throw DataError(path_.string() + ": csv data sources must provide the hash column");
    }
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (static_cast<int>(i) == hash_col) continue;
        const std::string& col = table.header[i];
        if (!is_legal_feature_name(col)) {
            throw DataError(path_.string() + ": illegal feature name '" + col + "' in csv header");
        }
        if (values_.count(col)) {
            throw DataError(path_.string() + ": duplicate csv column '" + col + "'");
        }
        columns_.push_back(col);
        values_[col];
    }
    for (const auto& row : table.rows) {
        const std::string& hash = row[static_cast<size_t>(hash_col)];
        if (hash.empty()) continue;
        for (size_t i = 0; i < table.header.size(); ++i) {
            if (static_cast<int>(i) == hash_col || row[i].empty()) continue;
            auto& vals = values_[table.header[i]][hash];
            vals.push_back(row[i]);
        }
    }
    for (auto& [feature, per_hash] : values_) {
        for (auto& [hash, vals] : per_hash) {
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        }
    }
}

std::vector<FeatureDef> CsvSource::features() const {
    std::vector<FeatureDef> out;
    for (const std::string& col : columns_) {
        out.push_back({col, FeatureKind::OneToMany, "", name_, context_});
    }
    std::sort(out.begin(), out.end(),
              [](const FeatureDef& a, const FeatureDef& b) { return a.name < b.name; });
    return out;
}

std::optional<FeatureDef> CsvSource::find_feature(const std::string& feature) const {
    if (!values_.count(feature)) return std::nullopt;
    return FeatureDef{feature, FeatureKind::OneToMany, "", name_, context_};
}

FeatureValues CsvSource::load(const std::string& feature) const {
    auto it = values_.find(feature);
    if (it == values_.end()) {
        throw DataError("unknown feature '" + feature + "' in source '" + name_ + "'");
    }
    return it->second;
}

std::vector<std::string> CsvSource::known_hashes() const {
    std::set<std::string> hashes;
    for (const auto& [feature, per_hash] : values_) {
        for (const auto& [hash, vals] : per_hash) hashes.insert(hash);
    }
    return {hashes.begin(), hashes.end()};
}

// -------------------------------------------------------------- config

namespace {

struct ParsedSourcePath {
    std::string name;
    std::string context;
    bool native = false;
};

ParsedSourcePath parse_source_path(const std::filesystem::path& path, const ContextRegistry& contexts) {
    std::string ext = path.extension().string();
    ParsedSourcePath out;
    if (ext == ".db") {
        out.native = true;
    } else if (ext != ".csv") {
        throw DataError(path.string() + ": data sources must end in .db or .csv");
    }
    std::string stem = path.stem().string();
    if (!is_legal_feature_name(stem)) {
        throw DataError(path.string() + ": source name '" + stem + "' is not an identifier");
    }
    out.name = stem;
    out.context = ContextRegistry::kDefaultContext;
    if (auto us = stem.find('_'); us != std::string::npos) {
        std::string prefix = stem.substr(0, us);
        if (contexts.contains(prefix)) out.context = prefix;
    }
    return out;
}

} // namespace

Configuration Configuration::open(const std::vector<std::filesystem::path>& paths,
                                  bool create_missing, const ContextRegistry& contexts) {
    Configuration cfg;
    cfg.contexts_ = contexts;
    for (const auto& path : paths) {
        ParsedSourcePath parsed = parse_source_path(path, contexts);
        if (cfg.find_source(parsed.name)) {
            throw DataError(path.string() + ": duplicate data source name '" + parsed.name + "'");
        }
        if (parsed.native) {
            bool create = create_missing && !std::filesystem::exists(path);
            cfg.sources_.push_back(
                std::make_shared<NativeSource>(parsed.name, parsed.context, path, create));
        } else {
            cfg.sources_.push_back(std::make_shared<CsvSource>(parsed.name, parsed.context, path));
        }
    }
    return cfg;
}

DataSource* Configuration::find_source(const std::string& name) const {
    for (const auto& src : sources_) {
        if (src->name() == name) return src.get();
    }
    return nullptr;
}

DataSource& Configuration::source(const std::string& name) const {
    if (DataSource* src = find_source(name)) return *src;
    throw DataError("unknown data source '" + name + "'");
}

NativeSource& Configuration::native(const std::string& name) const {
    DataSource& src = source(name);
    if (!src.writable()) {
        throw DataError("data source '" + name + "' is read-only");
    }
    return static_cast<NativeSource&>(src);
}

DataSource* Configuration::first_providing(const std::string& feature) const {
    for (const auto& src : sources_) {
        if (src->find_feature(feature)) return src.get();
    }
    return nullptr;
}

std::vector<SourceInfo> Configuration::info() const {
    std::vector<SourceInfo> out;
    for (const auto& src : sources_) {
        SourceInfo entry;
        entry.name = src->name();
        entry.path = src->path().string();
        entry.context = src->context();
        entry.writable = src->writable();
        entry.features = src->features();
        out.push_back(std::move(entry));
    }
    return out;
}

void Configuration::create_feature(const std::string& source_name, const std::string& feature,
                                   FeatureKind kind, const std::string& default_value) {
    check_creatable(feature, kind, contexts_);
    native(source_name).create_feature(feature, kind, default_value);
}

size_t Configuration::set_value(const std::string& source_name, const std::string& feature,
                                const std::string& value, const std::vector<std::string>& hashes) {
    return native(source_name).set_value(feature, value, hashes);
}

size_t Configuration::clear_values(const std::string& source_name, const std::string& feature,
                                   const std::vector<std::string>& hashes) {
    return native(source_name).clear_values(feature, hashes);
}

void Configuration::delete_feature(const std::string& source_name, const std::string& feature) {
    native(source_name).delete_feature(feature);
}

void Configuration::rename_feature(const std::string& source_name, const std::string& old_name,
                                   const std::string& new_name) {
    auto reserved = [&](const std::string& n) {
        return is_reserved_many(n) || mapping_target(n, contexts_).has_value();
    };
    if (!is_legal_feature_name(new_name) || new_name == kHashColumn) {
        throw DataError("illegal feature name '" + new_name + "'");
    }
    if (reserved(old_name) || reserved(new_name)) {
        throw DataError("cannot rename reserved feature '" +
                        (reserved(old_name) ? old_name : new_name) + "'");
    }
    native(source_name).rename_feature(old_name, new_name);
}

void Configuration::copy_feature(const std::string& from_source, const std::string& feature,
                                 const std::string& to_source, const std::string& new_name) {
    DataSource& from = source(from_source);
    NativeSource& to = native(to_source);
    if (from.context() != to.context()) {
        throw DataError("cannot copy feature '" + feature + "' across contexts (" + from.context() +
                        " -> " + to.context() + ")");
    }
    auto def = from.find_feature(feature);
    if (!def) {
        throw DataError("unknown feature '" + feature + "' in source '" + from_source + "'");
    }
    std::string target_name = new_name.empty() ? feature : new_name;
    check_creatable(target_name, def->kind, contexts_);
    if (to.find_feature(target_name)) {
        throw DataError("feature '" + target_name + "' already exists in source '" + to_source + "'");
    }
    to.create_feature(target_name, def->kind, def->default_value);
    FeatureValues values = from.load(feature);
    NativeSource::Batch tx(to);
    for (const auto& [hash, vals] : values) {
        for (const std::string& v : vals) {
            to.set_value(target_name, v, {hash});
        }
    }
    tx.commit();
}

size_t Configuration::import_csv(const std::filesystem::path& csv_path,
                                 const std::string& target_source) {
    NativeSource& target = native(target_source);
    std::ifstream in(csv_path);
    if (!in.is_open()) {
        throw DataError(csv_path.string() + ": cannot open for reading");
    }
    CsvTable table = read_csv(in, csv_path.string());
    int hash_col = table.column(kHashColumn);
    if (hash_col < 0) {
        throw DataError(csv_path.string() + ": csv imports must provide the hash column");
    }
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (static_cast<int>(i) == hash_col) continue;
        const std::string& col = table.header[i];
        check_creatable(col, FeatureKind::OneToMany, contexts_);
        if (!target.find_feature(col)) {
            target.create_feature(col, FeatureKind::OneToMany, "");
        }
    }
    size_t written = 0;
    NativeSource::Batch tx(target);
    for (const auto& row : table.rows) {
        const std::string& hash = row[static_cast<size_t>(hash_col)];
        if (hash.empty()) continue;
        for (size_t i = 0; i < table.header.size(); ++i) {
            if (static_cast<int>(i) == hash_col || row[i].empty()) continue;
            target.set_value(table.header[i], row[i], {hash});
            ++written;
        }
    }
    tx.commit();
    return written;
}

std::vector<std::filesystem::path> split_db_paths(const std::string& list) {
    std::vector<std::filesystem::path> out;
    size_t start = 0;
    while (start <= list.size()) {
        size_t end = list.find(':', start);
        if (end == std::string::npos) end = list.size();
        if (end > start) out.emplace_back(list.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

} // namespace gbd
