#pragma once

#include <filesystem>
#include <string>

namespace amodal {

// The guidance prompt texts. Defaults are compiled in; a prompts directory
// with files named like the members (decision_system.txt, ...) overrides them
// so prompts stay editable without a rebuild.
struct PromptSet {
    std::string decision_system;
    std::string decision_user;
    std::string geometric_system;
    std::string geometric_user;   // placeholders: {bbox} {image_size} {category}
    std::string semantic_system;
    std::string semantic_user;    // placeholder: {category}

    static PromptSet defaults();
    static PromptSet load(const std::filesystem::path& dir);  // missing files keep defaults

    // Writes the current set out as the editable template files.
    void save(const std::filesystem::path& dir) const;
};

// Replaces every "{key}" with its value.
std::string render_template(std::string text, const std::string& key, const std::string& value);

// Short content id used when logging which template produced a call.
std::string prompt_template_id(const std::string& text);

}  // namespace amodal
