#include "amodal/scripted.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "amodal/errors.hpp"

namespace amodal {

ScriptedChatModel::ScriptedChatModel(std::vector<ScriptEntry> script, std::string id)
    : id_(std::move(id)), script_(std::move(script)), consumed_(script_.size(), false) {
    if (script_.empty()) throw InvalidInputError("scripted chat: script must be non-empty");
}

std::string ScriptedChatModel::chat(const ChatVisionRequest& request) {
    validate_chat_request(request);
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    for (std::size_t i = 0; i < script_.size(); ++i) {
        if (consumed_[i]) continue;
        if (script_[i].matcher.empty() ||
            request.user_prompt.find(script_[i].matcher) != std::string::npos) {
            consumed_[i] = true;
            return script_[i].response;
        }
    }
    throw ScriptExhaustedError("scripted chat: no remaining entry matches prompt: " +
                               request.user_prompt.substr(0, 80));
}

int ScriptedChatModel::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open script file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_array())
        throw ConfigError("script file must be a JSON array: " + path.string());
    std::vector<ScriptEntry> script;
    for (const auto& entry : j) {
        if (!entry.is_object() || !entry.contains("response"))
            throw ConfigError("script entries need a \"response\": " + path.string());
        script.push_back(ScriptEntry{entry.value("match", std::string{}),
                                     entry["response"].get<std::string>()});
    }
    return script;
}

}  // namespace amodal
