#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace screening {

/// Flat `key = value` configuration with dotted section names.
/// `#` starts a comment; blank lines are ignored; keys are unique.
class Config {
public:
    [[nodiscard]] static Config parse(std::string_view text, const std::string& source = "<config>");
    [[nodiscard]] static Config load(const std::filesystem::path& path);

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
    [[nodiscard]] std::vector<std::string> keys() const;

    [[nodiscard]] std::string get_string(const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

    /// Throws ConfigError naming the first key not in `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

    void set(const std::string& key, const std::string& value);

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries_;
    std::string source_;
};

}  // namespace screening
