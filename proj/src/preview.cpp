#include "forgeprompt/preview.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "forgeprompt/io.hpp"
#include "forgeprompt/pipeline.hpp"
#include "forgeprompt/regions.hpp"

namespace forgeprompt::preview {
namespace {

namespace fs = std::filesystem;

struct Glyph {
    char c;
    const char* rows;  // 7 rows of 5 cells, '#' = ink
};

// clang-format off
constexpr Glyph kFont[] = {
    {'a', "...........###.....#.#####...#.####"},
    {'b', "#....#....####.#...##...##...#####."},
    {'c', "...........#####....#....#.....####"},
    {'d', "....#....#.#####...##...##...#.####"},
    {'e', "...........###.#...#######.....###."},
    {'f', "..##..#....#...####..#....#....#..."},
    {'g', "......#####...##...#.####....#.###."},
    {'h', "#....#....####.#...##...##...##...#"},
    {'i', "..#........##....#....#....#...###."},
    {'j', "...#........##....#....#.#..#..##.."},
    {'k', "#....#....#..#.#.#..##...#.#..#..#."},
    {'l', ".##....#....#....#....#....#...###."},
    {'m', "..........##.#.#.#.##.#.##.#.##...#"},
    {'n', "..........####.#...##...##...##...#"},
    {'o', "...........###.#...##...##...#.###."},
    {'p', ".....####.#...##...#####.#....#...."},
    {'q', "......#####...##...#.####....#....#"},
    {'r', "..........#.##.##..##....#....#...."},
    {'s', "...........#####.....###.....#####."},
    {'t', ".#....#...####..#....#....#..#..##."},
    {'u', "..........#...##...##...##..##.##.#"},
    {'v', "..........#...##...##...#.#.#...#.."},
    {'w', "..........#...##...##.#.##.#.#.#.#."},
    {'x', "..........#...#.#.#...#...#.#.#...#"},
    {'y', ".....#...##...##...#.####....#.###."},
    {'z', "..........#####...#...#...#...#####"},
    {'0', ".###.#...##..###.#.###..##...#.###."},
    {'1', "..#...##....#....#....#....#...###."},
    {'2', ".###.#...#....#...#...#...#...#####"},
    {'3', "#####...#...#.....#.....##...#.###."},
    {'4', "...#...##..#.#.#..#.#####...#....#."},
    {'5', "######....####.....#....##...#.###."},
    {'6', "..##..#...#....####.#...##...#.###."},
    {'7', "#####....#...#...#...#....#....#..."},
    {'8', ".###.#...##...#.###.#...##...#.###."},
    {'9', ".###.#...##...#.####....#...#..##.."},
    {' ', "..................................."},
    {',', ".....................##....#...#..."},
    {'.', "..........................##...##.."},
    {'-', "...............#####..............."},
    {'_', "..............................#####"},
    {'/', ".........#...#...#...#...#........."},
    {':', "......##...##........##...##......."},
    {'=', "..........#####.....#####.........."},
};
// clang-format on

const char* glyph_for(char c) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    for (const auto& g : kFont)
        if (g.c == c) return g.rows;
    return nullptr;
}

void put(ImageBuffer& img, int x, int y, double r, double g, double b) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    img.at(x, y, 0) = r;
    img.at(x, y, 1) = g;
    img.at(x, y, 2) = b;
}

void paste(ImageBuffer& dst, const ImageBuffer& src, int x0, int y0) {
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < 3; ++c) dst.at(x0 + x, y0 + y, c) = src.at(x, y, c);
}

ImageBuffer load_panel(const fs::path& p, const std::string& id) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) throw Error(Errc::MissingImage, id + ": missing " + p.string());
    try {
        return io::read_png(p);
    } catch (const Error& e) {
        throw Error(Errc::MissingImage, id + ": " + e.what());
    }
}

struct Row {
    std::string id;
    std::string prompt;
    std::array<ImageBuffer, 4> panels;
};

}  // namespace

void draw_text(ImageBuffer& img, int x, int y, std::string_view text, double r, double g, double b) {
    int cx = x;
    for (char c : text) {
        const char* rows = glyph_for(c);
        for (int gy = 0; gy < kGlyphH; ++gy)
            for (int gx = 0; gx < kGlyphW; ++gx) {
                const bool ink = rows ? rows[gy * kGlyphW + gx] == '#'
                                      : (gy == 0 || gy == kGlyphH - 1 || gx == 0 || gx == kGlyphW - 1);
                if (ink) put(img, cx + gx, y + gy, r, g, b);
            }
        cx += kAdvance;
    }
}

std::vector<std::string> wrap(std::string_view text, std::size_t max_chars) {
    max_chars = std::max<std::size_t>(max_chars, 1);
    std::vector<std::string> lines;
    std::istringstream words{std::string(text)};
    std::string word, cur;
    while (words >> word) {
        while (word.size() > max_chars) {
            if (!cur.empty()) lines.push_back(std::move(cur)), cur.clear();
            lines.push_back(word.substr(0, max_chars));
            word.erase(0, max_chars);
        }
        if (cur.empty())
            cur = word;
        else if (cur.size() + 1 + word.size() <= max_chars)
            cur += " " + word;
        else
            lines.push_back(std::exchange(cur, word));
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    return lines;
}

ImageBuffer montage(const fs::path& manifest, const std::vector<std::string>& ids) {
    if (ids.empty()) throw Error(Errc::InvalidArgument, "no sample ids given");
    std::string text;
    try {
        text = io::read_text(manifest);
    } catch (const Error& e) {
        throw Error(Errc::MissingImage, e.what());
    }
    std::map<std::string, pipeline::MixedSample> by_id;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = pipeline::Json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        try {
            auto s = pipeline::sample_from_json(j);
            by_id.emplace(s.id, std::move(s));
        } catch (const Error&) {
            // lint reports these; preview only needs the requested ids
        }
    }

    const fs::path dir = manifest.parent_path();
    std::vector<Row> rows;
    int panel_w = 0;
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(Errc::MissingImage, "no sample with id '" + id + "' in the manifest");
        const auto& s = it->second;
        Row row{id, s.prompt, {}};
        row.panels[0] = load_panel(dir / s.real_path, id);
        row.panels[1] = load_panel(dir / s.fake_path, id);
        row.panels[3] = load_panel(dir / s.mixed_path, id);
        const auto mask = regions::generate_mask(row.panels[0], row.panels[1]);
        row.panels[2] = ImageBuffer(mask.width, mask.height);
        for (int y = 0; y < mask.height; ++y)
            for (int x = 0; x < mask.width; ++x)
                for (int c = 0; c < 3; ++c) row.panels[2].at(x, y, c) = mask.at(x, y);
        if (row.panels[3].width != row.panels[0].width || row.panels[3].height != row.panels[0].height)
            throw Error(Errc::DimensionMismatch, id + ": mixed image size differs from the pair");
        panel_w = std::max(panel_w, row.panels[0].width);
        rows.push_back(std::move(row));
    }

    const int width = 4 * panel_w;
    const auto max_chars = static_cast<std::size_t>(std::max(1, (width - 2 * kMargin) / kAdvance));
    std::vector<std::vector<std::string>> strips;
    int height = 0;
    for (const auto& row : rows) {
        auto lines = wrap(row.id, max_chars);
        for (auto& l : wrap(row.prompt, max_chars)) lines.push_back(std::move(l));
        height += row.panels[0].height + 2 * kMargin + static_cast<int>(lines.size()) * kLineHeight;
        strips.push_back(std::move(lines));
    }

    ImageBuffer out(width, height, 0.0);
    int y = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        for (int p = 0; p < 4; ++p) paste(out, row.panels[p], p * panel_w, y);
        y += row.panels[0].height;
        // strip background
        const int strip_h = 2 * kMargin + static_cast<int>(strips[r].size()) * kLineHeight;
        for (int sy = y; sy < y + strip_h; ++sy)
            for (int x = 0; x < width; ++x) put(out, x, sy, 1.0, 1.0, 1.0);
        int ty = y + kMargin + 1;
        for (const auto& l : strips[r]) {
            draw_text(out, kMargin, ty, l, 0.0, 0.0, 0.0);
            ty += kLineHeight;
        }
        y += strip_h;
    }
    return out;
}

void write_preview(const fs::path& manifest, const std::vector<std::string>& ids, const fs::path& out) {
    io::write_png(out, montage(manifest, ids));
}

}  // namespace forgeprompt::preview
