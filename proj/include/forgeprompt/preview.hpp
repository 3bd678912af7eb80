#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "forgeprompt/image.hpp"

namespace forgeprompt::preview {

inline constexpr int kGlyphW = 5;
inline constexpr int kGlyphH = 7;
inline constexpr int kAdvance = kGlyphW + 1;
inline constexpr int kLineHeight = kGlyphH + 3;
inline constexpr int kMargin = 2;

/// Draws `text` with its top-left at (x, y) using the built-in 5x7 font.
/// Uppercase maps to lowercase; characters without a glyph draw as a box.
/// Pixels outside the image are clipped.
void draw_text(ImageBuffer& img, int x, int y, std::string_view text, double r, double g, double b);

/// Greedy word wrap to at most `max_chars` per line.
std::vector<std::string> wrap(std::string_view text, std::size_t max_chars);

/// One row per id: real | fake | mask | mixed, then a strip with the id and
/// the prompt. Width is 4 panel widths (the widest sample's). Paths in the
/// manifest resolve against its directory. Throws MissingImage for unknown
/// ids or missing files.
ImageBuffer montage(const std::filesystem::path& manifest, const std::vector<std::string>& ids);

/// montage() encoded as PNG at `out`.
void write_preview(const std::filesystem::path& manifest, const std::vector<std::string>& ids,
                   const std::filesystem::path& out);

}  // namespace forgeprompt::preview
