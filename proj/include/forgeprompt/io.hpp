#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forgeprompt/c2f.hpp"
#include "forgeprompt/image.hpp"
#include "forgeprompt/regions.hpp"

namespace forgeprompt::io {

namespace fs = std::filesystem;

/// Any PNG libpng can read; gray, palette, alpha and 16-bit inputs are
/// reduced to 8-bit RGB and scaled to [0,1]. Throws UnreadableImage.
ImageBuffer read_png(const fs::path& path);

/// 8-bit RGB, values clamped to [0,1] and rounded. The encoder settings are
/// fixed so equal images give equal bytes.
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
/// Creates parent directories. Throws Io.
void write_png(const fs::path& path, const ImageBuffer& img);

/// Round trip of a [0,1] value through 8 bits.
inline std::uint8_t to_u8(double v) {
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return static_cast<std::uint8_t>(v * 255.0 + 0.5);
}

/// {"points": [[x,y], ... 68 entries]}. Throws MalformedLandmarks.
regions::LandmarkSet read_landmarks(const fs::path& path);
void write_landmarks(const fs::path& path, const regions::LandmarkSet& lm);

/// One JSONL row of an embedding file.
struct EmbeddingRecord {
    std::optional<std::int64_t> prompt_index;
    std::optional<std::string> id;
    std::vector<double> vector;
};

/// Throws Io for unreadable files, InvalidArgument for malformed rows
/// (message carries the line number).
std::vector<EmbeddingRecord> read_embeddings(const fs::path& path);

c2f::EmbeddingBatch to_batch(const std::vector<EmbeddingRecord>& rows);

/// Whole file as a string. Throws Io.
std::string read_text(const fs::path& path);
/// Creates parent directories. Throws Io.
void write_text(const fs::path& path, const std::string& text);

}  // namespace forgeprompt::io
