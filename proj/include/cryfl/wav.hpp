#pragma once

#include <filesystem>

#include "cryfl/audio.hpp"

namespace cryfl {

// Mono PCM 16-bit little-endian WAV. Integer samples map to [-1, 1) by
// division by 32768.
AudioClip read_wav(const std::filesystem::path& path);

// Samples are clamped to [-1, 1] and quantized with rounding.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace cryfl
