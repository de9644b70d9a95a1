#include "amodal/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "amodal/errors.hpp"

namespace amodal {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_string(text, path.string());
}

Config Config::parse_string(std::string_view text, const std::string& origin) {
    Config config;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        config.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return config;
}

void Config::apply_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + assignment);
    std::string key = trim(std::string_view(assignment).substr(0, eq));
    const std::string value = trim(std::string_view(assignment).substr(eq + 1));
    if (key.find('.') == std::string::npos) key = "pipeline." + key;
    entries_[key] = value;
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto value = get(key);
    if (!value) return fallback;
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + *value);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto value = get(key);
    if (!value) return fallback;
    try {
        std::size_t used = 0;
        const double parsed = std::stod(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + *value);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto value = get(key);
    if (!value) return fallback;
    std::string v = *value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + *value);
}

nlohmann::ordered_json Config::echo() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [key, value] : entries_) out[key] = value;
    return out;
}

}  // namespace amodal
