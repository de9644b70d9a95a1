#include "amodal/cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "amodal/json_util.hpp"

namespace amodal {

std::optional<std::string> MemoryStore::get(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void MemoryStore::put(const std::string& key, const std::string& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_[key] = value;
}

DirectoryStore::DirectoryStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> DirectoryStore::get(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ifstream in(dir_ / (key + ".txt"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void DirectoryStore::put(const std::string& key, const std::string& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream out(dir_ / (key + ".txt"), std::ios::binary | std::ios::trunc);
    out << value;
}

CachingChatModel::CachingChatModel(std::shared_ptr<ChatVisionModel> inner,
                                   std::shared_ptr<KeyValueStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {}

std::string CachingChatModel::cache_key(const std::string& model_id,
                                        const ChatVisionRequest& request) {
    // Dimensions and decode params are folded in as text; the pixel payload as
    // raw bytes. Hex floats keep the temperature exact.
    char meta[128];
    std::snprintf(meta, sizeof meta, "|%dx%d|%d|%a|", request.image.height(),
                  request.image.width(), request.decode.max_tokens, request.decode.temperature);
    std::uint64_t h = fnv1a64(model_id);
    h = fnv1a64(std::span<const std::uint8_t>(
                    reinterpret_cast<const std::uint8_t*>(request.system_prompt.data()),
                    request.system_prompt.size()),
                h);
    h = fnv1a64(std::span<const std::uint8_t>(
                    reinterpret_cast<const std::uint8_t*>(request.user_prompt.data()),
                    request.user_prompt.size()),
                h);
    h = fnv1a64(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(meta),
                                              std::char_traits<char>::length(meta)),
                h);
    h = fnv1a64(std::span<const std::uint8_t>(request.image.data().data(),
                                              request.image.data().size()),
                h);
    return "chat-" + to_hex(h);
}

std::string CachingChatModel::chat(const ChatVisionRequest& request) {
    validate_chat_request(request);
    const std::string key = cache_key(inner_->id(), request);
    try {
        if (auto cached = store_->get(key)) {
            ++hits_;
            return *cached;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "warning: cache read failed (%s); calling backend\n", e.what());
    }
    ++misses_;
    std::string response = inner_->chat(request);
    try {
        store_->put(key, response);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "warning: cache write failed (%s)\n", e.what());
    }
    return response;
}

}  // namespace amodal
