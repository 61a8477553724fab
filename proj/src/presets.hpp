#pragma once

#include <cstddef>

namespace povgini {

// Preset texts compiled in from presets/*.conf.
struct EmbeddedPreset {
  const char* name;
  const char* text;
};

extern const EmbeddedPreset kEmbeddedPresets[];
extern const std::size_t kEmbeddedPresetCount;

} // namespace povgini
