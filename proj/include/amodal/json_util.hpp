#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace amodal {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Scans the text for balanced {...} candidates (string- and escape-aware) and
// returns the first one that parses as a JSON object. Chat models like to wrap
// payloads in prose and markdown fences; this skips all of that. Total: never
// throws, returns nullopt when nothing parses.
std::optional<nlohmann::json> extract_first_json_object(std::string_view text);

// FNV-1a 64-bit, used for cache keys and prompt-template ids.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed);
std::string to_hex(std::uint64_t value);

}  // namespace amodal
