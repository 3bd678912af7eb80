#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "forgeprompt/image.hpp"
#include "forgeprompt/rng.hpp"

namespace forgeprompt::regions {

enum class Region { Mouth, Nose, Eyes, Face };

/// Fixed evaluation order for forgery-region extraction.
inline constexpr std::array<Region, 4> kAllRegions{Region::Mouth, Region::Nose, Region::Eyes, Region::Face};

std::string_view to_string(Region r) noexcept;
std::optional<Region> parse_region(std::string_view name) noexcept;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// 68 points in dlib ordering.
struct LandmarkSet {
    static constexpr std::size_t kCount = 68;
    std::array<Point, kCount> points{};

    /// Throws MalformedLandmarks if any point falls outside
    /// [-slack, width-1+slack] x [-slack, height-1+slack].
    void validate(int width, int height, double slack) const;
};

/// Landmark indices per region (dlib 68-point scheme).
std::vector<std::size_t> landmark_indices(Region r);

struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;  // inclusive
    int y1 = -1;

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

struct RegionSpec {
    Region name = Region::Face;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> membership;  // row-major, 1 = inside
    std::size_t pixel_count = 0;
    BoundingBox bbox;

    bool contains(int x, int y) const { return membership[static_cast<std::size_t>(y) * width + x] != 0; }

    /// Recomputes pixel_count and bbox from membership.
    void refresh();
};

using RegionList = std::vector<Region>;

/// Per-pixel mean over RGB of |real - fake|. Throws DimensionMismatch.
ForgeryMask generate_mask(const ImageBuffer& real, const ImageBuffer& fake);

/// Andrew's monotone chain; counter-clockwise in image coordinates, no
/// collinear points.
std::vector<Point> convex_hull(std::vector<Point> pts);

/// Pixels whose integer coordinates lie inside or on the hull of `pts`.
/// Throws DegenerateHull if the hull has zero area or covers no pixel.
RegionSpec rasterize_hull(Region name, std::span<const Point> pts, int width, int height);

/// mouth, nose, eyes, face, in that order. Face also absorbs every organ
/// region so it is always a superset.
std::array<RegionSpec, 4> derive_regions(const LandmarkSet& landmarks, int width, int height);

/// Mean mask value over each region's members, in kAllRegions order.
std::array<double, 4> region_means(const ForgeryMask& mask, const std::array<RegionSpec, 4>& regions);

/// Regions whose mean mask value exceeds theta, in kAllRegions order.
RegionList extract_forgery_regions(const ForgeryMask& mask, const std::array<RegionSpec, 4>& regions,
                                   double theta);

/// Uniform pick; nullopt when the list is empty.
std::optional<Region> select_region(const RegionList& candidates, Rng& rng);

}  // namespace forgeprompt::regions
