#include "hamfin/run_config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hamfin/errors.hpp"

namespace hamfin {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE)
        throw ParameterError("config [" + section + "] " + key + ": not a decimal number: '" + v + "'");
    return x;
}

long parse_int(const std::string& section, const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE)
        throw ParameterError("config [" + section + "] " + key + ": not an integer: '" + v + "'");
    return x;
}

} // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParameterError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParameterError("config line " + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ParameterError("config line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            throw ParameterError("config: duplicate key '" + key + "' in [" + section + "]");
        sec[key] = value;
    }
    return cfg;
}

bool RunConfig::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end())
        throw ParameterError("config: missing required section [" + section + "]");
    auto kt = it->second.find(key);
    if (kt == it->second.end())
        throw ParameterError("config: missing required key '" + key + "' in [" + section + "]");
    return kt->second;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key) const {
    return parse_double(section, key, get_string(section, key));
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long RunConfig::get_int(const std::string& section, const std::string& key) const {
    return parse_int(section, key, get_string(section, key));
}

long RunConfig::get_int(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParameterError("config [" + section + "] " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> RunConfig::get_double_list(const std::string& section,
                                               const std::string& key) const {
    const std::string v = get_string(section, key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw ParameterError("config [" + section + "] " + key + ": empty list item");
        out.push_back(parse_double(section, key, t));
    }
    if (out.empty()) throw ParameterError("config [" + section + "] " + key + ": empty list");
    return out;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

void RunConfig::require_known_keys(const std::string& section,
                                   const std::set<std::string>& allowed) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return;
    for (const auto& [key, value] : it->second)
        if (!allowed.count(key))
            throw ParameterError("config: unknown key '" + key + "' in [" + section + "]");
}

} // namespace hamfin
