/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include "gbd/identity.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

struct sqlite3;

namespace gbd {

enum class FeatureKind { OneToOne, OneToMany };

const char* to_string(FeatureKind kind);

// [a-zA-Z][a-zA-Z0-9_]*
bool is_legal_feature_name(std::string_view name);

// For to_{cxt} names with a registered cxt: the target context.
std::optional<std::string> mapping_target(std::string_view feature, const ContextRegistry& contexts);

struct FeatureDef {
    std::string name;
    FeatureKind kind = FeatureKind::OneToMany;
    std::string default_value; // OneToOne only
    std::string source_name;
    std::string context;
};

// hash -> values, both sorted; OneToOne rows carry exactly one value
using FeatureValues = std::map<std::string, std::vector<std::string>>;

// A feature container bound to exactly one context. Context and name are
// derived from the filename: a stem prefix before the first '_' naming a
// registered context binds the source to it (full stem stays the source
// name); anything else belongs to the default context cnf.
class DataSource {
public:
    virtual ~DataSource() = default;

    const std::string& name() const { return name_; }
    const std::string& context() const { return context_; }
    const std::filesystem::path& path() const { return path_; }
    virtual bool writable() const = 0;

    virtual std::vector<FeatureDef> features() const = 0;
    virtual std::optional<FeatureDef> find_feature(const std::string& feature) const = 0;
    virtual FeatureValues load(const std::string& feature) const = 0;
    // distinct hashes over all feature relations, sorted
    virtual std::vector<std::string> known_hashes() const = 0;

protected:
    DataSource(std::string name, std::string context, std::filesystem::path path)
        : name_(std::move(name)), context_(std::move(context)), path_(std::move(path)) {}

    std::string name_;
    std::string context_;
    std::filesystem::path path_;
};

// Single-file relational database provider. One relation per feature
// keyed by hash plus a catalog relation; single-writer/multi-reader per
// file, every mutating call is one transaction.
class NativeSource final : public DataSource {
public:
    NativeSource(std::string name, std::string context, std::filesystem::path path, bool create);
    ~NativeSource() override;

    NativeSource(const NativeSource&) = delete;
    NativeSource& operator=(const NativeSource&) = delete;

    bool writable() const override { return true; }
    std::vector<FeatureDef> features() const override;
    std::optional<FeatureDef> find_feature(const std::string& feature) const override;
    FeatureValues load(const std::string& feature) const override;
    std::vector<std::string> known_hashes() const override;

    void create_feature(const std::string& feature, FeatureKind kind, const std::string& default_value);
    // ensures the feature exists with the given shape; errors on kind conflicts
    void ensure_feature(const std::string& feature, FeatureKind kind, const std::string& default_value);
    size_t set_value(const std::string& feature, const std::string& value,
                     const std::vector<std::string>& hashes);
    size_t clear_values(const std::string& feature, const std::vector<std::string>& hashes);
    void delete_feature(const std::string& feature);
    void rename_feature(const std::string& old_name, const std::string& new_name);

    // Groups many mutations into one transaction (used by batch runners
    // so a whole run commits atomically and deterministically).
    class Batch {
    public:
        explicit Batch(NativeSource& source);
        ~Batch();
        Batch(const Batch&) = delete;
        Batch& operator=(const Batch&) = delete;
        void commit();

    private:
        NativeSource& source_;
        bool open_;
    };

private:
    friend class Batch;
    struct Mutation;
    void begin();
    void commit_tx();
    void rollback();
    FeatureDef require_feature(const std::string& feature) const;

    sqlite3* db_ = nullptr;
    int tx_depth_ = 0;
};

// Read-only CSV provider: header row with a mandatory hash column; every
// other column is a OneToMany feature.
class CsvSource final : public DataSource {
public:
    CsvSource(std::string name, std::string context, std::filesystem::path path);

    bool writable() const override { return false; }
    std::vector<FeatureDef> features() const override;
    std::optional<FeatureDef> find_feature(const std::string& feature) const override;
    FeatureValues load(const std::string& feature) const override;
    std::vector<std::string> known_hashes() const override;

private:
    std::vector<std::string> columns_; // without hash
    std::map<std::string, FeatureValues> values_;
};

struct SourceInfo {
    std::string name;
    std::string path;
    std::string context;
    bool writable = false;
    std::vector<FeatureDef> features;
};

// An ordered set of data sources; order is resolution priority.
class Configuration {
public:
    Configuration() : contexts_(default_contexts()) {}

    static Configuration open(const std::vector<std::filesystem::path>& paths, bool create_missing,
                              const ContextRegistry& contexts = default_contexts());

    const std::vector<std::shared_ptr<DataSource>>& sources() const { return sources_; }
    const ContextRegistry& contexts() const { return contexts_; }

    DataSource* find_source(const std::string& name) const;
    DataSource& source(const std::string& name) const;     // DataError when absent
    NativeSource& native(const std::string& name) const;   // DataError when absent or read-only

    // first source in configuration order providing the feature
    DataSource* first_providing(const std::string& feature) const;

    std::vector<SourceInfo> info() const;

    // store ops, validating reserved names and source writability
    void create_feature(const std::string& source_name, const std::string& feature, FeatureKind kind,
                        const std::string& default_value = "");
    size_t set_value(const std::string& source_name, const std::string& feature,
                     const std::string& value, const std::vector<std::string>& hashes);
    size_t clear_values(const std::string& source_name, const std::string& feature,
                        const std::vector<std::string>& hashes);
    void delete_feature(const std::string& source_name, const std::string& feature);
    void rename_feature(const std::string& source_name, const std::string& old_name,
                        const std::string& new_name);
    void copy_feature(const std::string& from_source, const std::string& feature,
                      const std::string& to_source, const std::string& new_name = "");
    size_t import_csv(const std::filesystem::path& csv_path, const std::string& target_source);

private:
    std::vector<std::shared_ptr<DataSource>> sources_;
    ContextRegistry contexts_;
};

// GBD_DB-style colon-separated path list.
std::vector<std::filesystem::path> split_db_paths(const std::string& list);

} // namespace gbd
