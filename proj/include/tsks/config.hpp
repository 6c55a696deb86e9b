#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key-value configuration records with [section] headers. Keys are
// flattened to "section.key"; flag overrides use the same names.

namespace tsks {

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_text(buf.str());
    }

    static KeyValueConfig from_text(const std::string& text) {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        long long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            std::string t = line.substr(first, last - first + 1);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = t.substr(1, t.size() - 2);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: expected key=value at line " +
                                         std::to_string(lineno));
            std::string key = strip(t.substr(0, eq));
            std::string value = strip(t.substr(eq + 1));
            if (!section.empty()) key = section + "." + key;
            cfg.values_[key] = value;
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw std::runtime_error("config: key " + key + " is not a number: " + it->second);
        }
    }

    long long get_int(const std::string& key, long long fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw std::runtime_error("config: key " + key + " is not an integer: " + it->second);
        }
    }

    /// Comma-separated list value.
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<std::string> out;
        std::istringstream ls(it->second);
        std::string item;
        while (std::getline(ls, item, ',')) {
            item = strip(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Canonical text form (sorted keys, section-less flat records).
    std::string serialize() const {
        std::ostringstream os;
        for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
        return os.str();
    }

private:
    static std::string strip(const std::string& s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) return "";
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    }

    std::map<std::string, std::string> values_;
};

} // namespace tsks
