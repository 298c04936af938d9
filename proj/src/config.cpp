#include "lexdiv/config.hpp"

#include <fstream>
#include <sstream>

#include "lexdiv/util.hpp"

namespace lexdiv {

KvConfig KvConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    KvConfig config;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv[0] == '#') continue;
        const size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        config.values_[std::string(trim(sv.substr(0, eq)))] = std::string(trim(sv.substr(eq + 1)));
    }
    return config;
}

std::string KvConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string KvConfig::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key \"" + key + "\"");
    return it->second;
}

uint64_t KvConfig::get_u64(const std::string& key, uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\" is not an integer: " + it->second);
    }
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\" is not a number: " + it->second);
    }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key \"" + key + "\" is not a boolean: " + it->second);
}

std::vector<std::string> KvConfig::group_names(const std::string& prefix) const {
    std::vector<std::string> names;
    const std::string p = prefix + ".";
    for (const auto& [key, _] : values_) {
        if (key.rfind(p, 0) != 0) continue;
        const size_t dot = key.find('.', p.size());
        if (dot == std::string::npos) continue;
        const std::string name = key.substr(p.size(), dot - p.size());
        if (names.empty() || names.back() != name) names.push_back(name);
    }
    return names; // map iteration is sorted already
}

std::string KvConfig::canonical() const {
    std::ostringstream ss;
    for (const auto& [key, value] : values_) ss << key << '=' << value << '\n';
    return ss.str();
}

std::string KvConfig::hash() const { return sha256_hex(canonical()); }

} // namespace lexdiv
