#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirlat {

/// Malformed or unknown configuration, with the source position in the message.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. `[name]` opens a section; `#` starts a comment.
/// Keys before the first header belong to the section "".
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Config parse(std::istream& in, const std::string& source = "<config>")
    {
        Config cfg;
        cfg.source_ = source;
        std::string section;
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (text.empty()) {
                continue;
            }
            if (text.front() == '[') {
                if (text.back() != ']') {
                    throw ConfigError(source + ":" + std::to_string(line) + ": unterminated section header");
                }
                section = trim(text.substr(1, text.size() - 2));
                cfg.sections_[section];
                cfg.section_line_[section] = line;
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value");
            }
            const std::string key = trim(text.substr(0, eq));
            if (key.empty()) {
                throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
            }
            auto& sec = cfg.sections_[section];
            if (sec.count(key)) {
                throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first at line " +
                                  std::to_string(sec[key].line) + ")");
            }
            sec[key] = {trim(text.substr(eq + 1)), line};
        }
        return cfg;
    }

    static Config parse_string(const std::string& text, const std::string& source = "<config>")
    {
        std::istringstream in(text);
        return parse(in, source);
    }

    static Config load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file " + path);
        }
        return parse(in, path);
    }

    const std::string& source() const { return source_; }
    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

    std::vector<std::string> section_names() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : sections_) {
            out.push_back(k);
        }
        return out;
    }

    const std::map<std::string, Entry>& section(const std::string& s) const
    {
        static const std::map<std::string, Entry> empty;
        const auto it = sections_.find(s);
        return it == sections_.end() ? empty : it->second;
    }

    int section_line(const std::string& s) const
    {
        const auto it = section_line_.find(s);
        return it == section_line_.end() ? 0 : it->second;
    }

    void set(const std::string& section, const std::string& key, const std::string& value)
    {
        sections_[section][key] = {value, 0};
    }

    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return {};
        }
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

private:
    std::string source_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_line_;
};

/// Typed binding of one config section onto a struct. Every key in the section
/// must be bound; values are parsed and range-checked as they are applied.
class SectionBinder {
public:
    explicit SectionBinder(std::string section) : section_(std::move(section)) {}

    SectionBinder& real(const std::string& key, double& target, std::function<bool(double)> ok = {},
                        std::string rule = {})
    {
        handlers_[key] = [&target, ok, rule, key](const std::string& v, const std::string& where) {
            const double x = parse_real(v, where, key);
            if (ok && !ok(x)) {
                throw ConfigError(where + ": " + key + " = " + v + " violates " + rule);
            }
            target = x;
        };
        return *this;
    }

    SectionBinder& integer(const std::string& key, std::int64_t& target, std::int64_t lo, std::int64_t hi)
    {
        handlers_[key] = [&target, lo, hi, key](const std::string& v, const std::string& where) {
            const std::int64_t x = parse_int(v, where, key);
            if (x < lo || x > hi) {
                throw ConfigError(where + ": " + key + " = " + v + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
            }
            target = x;
        };
        return *this;
    }

    SectionBinder& integer(const std::string& key, int& target, int lo, int hi)
    {
        handlers_[key] = [&target, lo, hi, key](const std::string& v, const std::string& where) {
            const std::int64_t x = parse_int(v, where, key);
            if (x < lo || x > hi) {
                throw ConfigError(where + ": " + key + " = " + v + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
            }
            target = static_cast<int>(x);
        };
        return *this;
    }

    SectionBinder& text(const std::string& key, std::string& target, std::set<std::string> allowed = {})
    {
        handlers_[key] = [&target, allowed, key](const std::string& v, const std::string& where) {
            if (!allowed.empty() && !allowed.count(v)) {
                std::string list;
                for (const auto& a : allowed) {
                    list += (list.empty() ? "" : ", ") + a;
                }
                throw ConfigError(where + ": " + key + " = " + v + " is not one of {" + list + "}");
            }
            target = v;
        };
        return *this;
    }

    SectionBinder& reals(const std::string& key, std::vector<double>& target)
    {
        handlers_[key] = [&target, key](const std::string& v, const std::string& where) {
            target.clear();
            for (const auto& item : split(v)) {
                target.push_back(parse_real(item, where, key));
            }
        };
        return *this;
    }

    SectionBinder& integers(const std::string& key, std::vector<int>& target)
    {
        handlers_[key] = [&target, key](const std::string& v, const std::string& where) {
            target.clear();
            for (const auto& item : split(v)) {
                target.push_back(static_cast<int>(parse_int(item, where, key)));
            }
        };
        return *this;
    }

    SectionBinder& flag(const std::string& key, bool& target)
    {
        handlers_[key] = [&target, key](const std::string& v, const std::string& where) {
            if (v == "true" || v == "1" || v == "yes") {
                target = true;
            } else if (v == "false" || v == "0" || v == "no") {
                target = false;
            } else {
                throw ConfigError(where + ": " + key + " = " + v + " is not a boolean");
            }
        };
        return *this;
    }

    void apply(const Config& cfg) const
    {
        for (const auto& [key, entry] : cfg.section(section_)) {
            const std::string where = cfg.source() + ":" + std::to_string(entry.line);
            const auto it = handlers_.find(key);
            if (it == handlers_.end()) {
                throw ConfigError(where + ": unknown key '" + key + "' in [" + section_ + "]");
            }
            it->second(entry.value, where);
        }
    }

    std::vector<std::string> keys() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : handlers_) {
            out.push_back(k);
        }
        return out;
    }

    static std::vector<std::string> split(const std::string& v)
    {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(v);
        while (std::getline(in, item, ',')) {
            item = Config::trim(item);
            if (!item.empty()) {
                out.push_back(item);
            }
        }
        return out;
    }

private:
    static double parse_real(const std::string& v, const std::string& where, const std::string& key)
    {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used == v.size()) {
                return x;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(where + ": " + key + " = " + v + " is not a number");
    }

    static std::int64_t parse_int(const std::string& v, const std::string& where, const std::string& key)
    {
        std::int64_t x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            throw ConfigError(where + ": " + key + " = " + v + " is not an integer");
        }
        return x;
    }

    std::string section_;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers_;
};

}  // namespace sirlat
