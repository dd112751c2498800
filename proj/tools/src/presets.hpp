#pragma once

// Built-in scenario texts for the reference experiments. Presets are plain
// scenario files fed through the normal parser, so running one exercises
// exactly the same path as a user file.

#include <optional>
#include <string>
#include <vector>

namespace unitrig::cli {

struct Preset {
    std::string name;
    std::string description;
    std::string text;
};

const std::vector<Preset>& presets();
std::optional<std::string> preset_text(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace unitrig::cli
