#ifndef INEQLAB_CONFIG_HPP
#define INEQLAB_CONFIG_HPP

// Flat key=value configuration: a text file of `key = value` lines plus
// command-line overrides of the same shape. '#' starts a comment.

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace ineqlab {

struct KeyValueConfig {
    std::map<std::string, std::string> entries;

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    void apply_override(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw DomainError("config: expected key=value, got '" + kv + "'");
        const std::string key = trim(kv.substr(0, eq));
        const std::string val = trim(kv.substr(eq + 1));
        if (key.empty()) throw DomainError("config: empty key in '" + kv + "'");
        entries[key] = val;
    }

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DomainError("config: cannot read " + path);
        KeyValueConfig cfg;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            cfg.apply_override(line);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        char* end = nullptr;
        const double v = std::strtod(it->second.c_str(), &end);
        if (end == it->second.c_str() || *end != '\0')
            throw DomainError("config: key '" + key + "' is not a number: " + it->second);
        return v;
    }

    int get_int(const std::string& key, int fallback) const {
        const double v = get_double(key, static_cast<double>(fallback));
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw DomainError("config: key '" + key + "' is not an integer");
        return i;
    }

    long long get_long(const std::string& key, long long fallback) const {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        char* end = nullptr;
        const long long v = std::strtoll(it->second.c_str(), &end, 10);
        if (end == it->second.c_str() || *end != '\0')
            throw DomainError("config: key '" + key + "' is not an integer: " + it->second);
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        const std::string& v = it->second;
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw DomainError("config: key '" + key + "' is not a boolean: " + v);
    }

    // Sorted "k=v" join, used as the CSV config-echo comment.
    std::string echo() const {
        std::ostringstream out;
        bool first = true;
        for (const auto& [k, v] : entries) {
            if (!first) out << " ";
            out << k << "=" << v;
            first = false;
        }
        return out.str();
    }
};

} // namespace ineqlab

#endif
