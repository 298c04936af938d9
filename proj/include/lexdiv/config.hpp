#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexdiv/errors.hpp"

namespace lexdiv {

// Flat key=value configuration ('#' comments, dotted keys for grouping).
// CLI flags overwrite file values; the resolved map is what gets hashed, so
// equal hashes really do mean equal runs.
class KvConfig {
public:
    KvConfig() = default;
    static KvConfig from_file(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback = "") const;
    std::string require(const std::string& key) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Distinct <name> components among keys "prefix.<name>.…", sorted.
    std::vector<std::string> group_names(const std::string& prefix) const;

    // Sorted key=value serialization and its SHA-256; embedded in outputs.
    std::string canonical() const;
    std::string hash() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace lexdiv
