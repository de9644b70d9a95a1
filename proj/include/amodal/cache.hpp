#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "amodal/backends.hpp"

namespace amodal {

class KeyValueStore {
public:
    virtual ~KeyValueStore() = default;
    virtual std::optional<std::string> get(const std::string& key) = 0;
    virtual void put(const std::string& key, const std::string& value) = 0;
};

class MemoryStore : public KeyValueStore {
public:
    std::optional<std::string> get(const std::string& key) override;
    void put(const std::string& key, const std::string& value) override;

private:
    std::mutex mutex_;
    std::map<std::string, std::string> entries_;
};

// One file per key; survives process restarts.
class DirectoryStore : public KeyValueStore {
public:
    explicit DirectoryStore(std::filesystem::path dir);
    std::optional<std::string> get(const std::string& key) override;
    void put(const std::string& key, const std::string& value) override;

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
};

// Wraps a chat model with request-keyed response caching. The key covers the
// model id, both prompts, the raw image bytes and the decode parameters, so
// any observable input change misses. Store failures never fail the call;
// they degrade to pass-through with a stderr warning.
class CachingChatModel : public ChatVisionModel {
public:
    CachingChatModel(std::shared_ptr<ChatVisionModel> inner,
                     std::shared_ptr<KeyValueStore> store);

    std::string chat(const ChatVisionRequest& request) override;
    std::string id() const override { return inner_->id(); }

    int hits() const { return hits_; }
    int misses() const { return misses_; }

    static std::string cache_key(const std::string& model_id, const ChatVisionRequest& request);

private:
    std::shared_ptr<ChatVisionModel> inner_;
    std::shared_ptr<KeyValueStore> store_;
    std::atomic<int> hits_{0};
    std::atomic<int> misses_{0};
};

}  // namespace amodal
