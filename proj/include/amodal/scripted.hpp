#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "amodal/backends.hpp"

namespace amodal {

struct ScriptEntry {
    std::string matcher;   // substring looked up in the user prompt; "" matches anything
    std::string response;
};

// Deterministic chat double: each call consumes the first not-yet-used entry
// whose matcher occurs in the user prompt. Calls are serialized so scripts
// play back in order under concurrency.
class ScriptedChatModel : public ChatVisionModel {
public:
    explicit ScriptedChatModel(std::vector<ScriptEntry> script, std::string id = "scripted");
    ScriptedChatModel(std::initializer_list<ScriptEntry> script)
        : ScriptedChatModel(std::vector<ScriptEntry>(script)) {}

    std::string chat(const ChatVisionRequest& request) override;
    std::string id() const override { return id_; }

    int calls() const;

private:
    std::string id_;
    std::vector<ScriptEntry> script_;
    std::vector<bool> consumed_;
    mutable std::mutex mutex_;
    int calls_ = 0;
};

// Script file: JSON array of {"match": str, "response": str}.
std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

}  // namespace amodal
