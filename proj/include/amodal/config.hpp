#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace amodal {

// INI-style config: "[section]" headers (dots allowed for nesting) and
// "key = value" lines, flattened to "section.key" entries. '#' and ';' start
// comments. Overrides arrive as "key=value"; a bare key without a dot is
// shorthand for the pipeline section.
class Config {
public:
    Config() = default;

    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(std::string_view text, const std::string& origin = "<string>");

    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // Full effective key/value map, for echoing into run records.
    nlohmann::ordered_json echo() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace amodal
