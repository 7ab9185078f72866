#include "screening/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "screening/csv.hpp"
#include "screening/errors.hpp"

namespace screening {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string key = trim(line.substr(0, eq));
        std::ostringstream where;
        where << source << ":" << line_no << ": ";
        if (eq == std::string::npos) {
            throw ConfigError(key, where.str() + "expected 'key = value' for key '" + key + "'");
        }
        if (!valid_key(key)) throw ConfigError(key, where.str() + "invalid key '" + key + "'");
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(key, where.str() + "empty value for key '" + key + "'");
        if (cfg.entries_.count(key)) throw ConfigError(key, where.str() + "duplicate key '" + key + "'");
        cfg.entries_[key] = Entry{value, line_no};
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

std::string Config::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key, source_ + ": missing required key '" + key + "'");
    return it->second.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        return parse_double(v);
    } catch (const Error&) {
        throw ConfigError(key, source_ + ":" + std::to_string(entries_.at(key).line) + ": key '" + key +
                                   "' expects a number, got '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key, source_ + ":" + std::to_string(entries_.at(key).line) + ": key '" + key +
                                   "' expects an integer, got '" + v + "'");
    }
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key, source_ + ": key '" + key + "' expects a boolean, got '" + v + "'");
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, e] : entries_) {
        if (!allowed.count(k)) {
            throw ConfigError(k, source_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
        }
    }
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = Entry{value, 0}; }

}  // namespace screening
