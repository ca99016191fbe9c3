#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hamfin {

/**
 * Flat key-value configuration with INI-style sections ([model], [grid],
 * [evolution], [mc], [analysis]). Numeric values are decimal text. Each
 * subcommand validates only the sections it reads; within a read section,
 * unknown keys are rejected.
 */
class RunConfig {
public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    /// Comma-separated list of decimal values.
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    /// Throws ParameterError when the section holds a key not in `allowed`.
    void require_known_keys(const std::string& section,
                            const std::set<std::string>& allowed) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace hamfin
