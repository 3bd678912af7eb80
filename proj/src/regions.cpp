#include "forgeprompt/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::regions {
namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

constexpr double kInsideEps = 1e-9;

}  // namespace

std::string_view to_string(Region r) noexcept {
    switch (r) {
        case Region::Mouth: return "mouth";
        case Region::Nose: return "nose";
        case Region::Eyes: return "eyes";
        case Region::Face: return "face";
    }
    return "unknown";
}

std::optional<Region> parse_region(std::string_view name) noexcept {
    for (Region r : kAllRegions)
        if (to_string(r) == name) return r;
    return std::nullopt;
}

void LandmarkSet::validate(int width, int height, double slack) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < -slack || p.y < -slack ||
            p.x > width - 1 + slack || p.y > height - 1 + slack)
            throw Error(Errc::MalformedLandmarks, "landmark " + std::to_string(i) + " outside image bounds");
    }
}

std::vector<std::size_t> landmark_indices(Region r) {
    auto range = [](std::size_t lo, std::size_t hi, std::vector<std::size_t>& out) {
        for (std::size_t i = lo; i <= hi; ++i) out.push_back(i);
    };
    std::vector<std::size_t> idx;
    switch (r) {
        case Region::Mouth: range(48, 67, idx); break;
        case Region::Nose: range(27, 35, idx); break;
        case Region::Eyes:
            range(17, 26, idx);  // brows
            range(36, 47, idx);  // eyes
            break;
        case Region::Face: range(0, 67, idx); break;
    }
    return idx;
}

void RegionSpec::refresh() {
    pixel_count = 0;
    bbox = BoundingBox{width, height, -1, -1};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            if (!contains(x, y)) continue;
            ++pixel_count;
            bbox.x0 = std::min(bbox.x0, x);
            bbox.y0 = std::min(bbox.y0, y);
            bbox.x1 = std::max(bbox.x1, x);
            bbox.y1 = std::max(bbox.y1, y);
        }
}

ForgeryMask generate_mask(const ImageBuffer& real, const ImageBuffer& fake) {
    if (real.width != fake.width || real.height != fake.height)
        throw Error(Errc::DimensionMismatch, "real and fake images differ in size");
    ForgeryMask mask(real.width, real.height);
    simd::kernels().abs_diff_mean3(real.data.data(), fake.data.data(), mask.data.data(), mask.size());
    return mask;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

RegionSpec rasterize_hull(Region name, std::span<const Point> pts, int width, int height) {
    const auto hull = convex_hull(std::vector<Point>(pts.begin(), pts.end()));
    double area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % hull.size()];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (hull.size() < 3 || std::fabs(area2) <= 1e-12)
        throw Error(Errc::DegenerateHull, std::string(to_string(name)) + " hull has zero area");

    RegionSpec spec;
    spec.name = name;
    spec.width = width;
    spec.height = height;
    spec.membership.assign(static_cast<std::size_t>(width) * height, 0);

    double min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y, max_y = hull[0].y;
    for (const Point& p : hull) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - kInsideEps)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(max_x + kInsideEps)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - kInsideEps)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(max_y + kInsideEps)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const Point p{static_cast<double>(x), static_cast<double>(y)};
            bool inside = true;
            for (std::size_t i = 0; i < hull.size() && inside; ++i)
                inside = cross(hull[i], hull[(i + 1) % hull.size()], p) >= -kInsideEps;
            if (inside) spec.membership[static_cast<std::size_t>(y) * width + x] = 1;
        }
    spec.refresh();
    if (spec.pixel_count == 0)
        throw Error(Errc::DegenerateHull, std::string(to_string(name)) + " hull covers no pixel");
    return spec;
}

std::array<RegionSpec, 4> derive_regions(const LandmarkSet& landmarks, int width, int height) {
    std::array<RegionSpec, 4> out;
    for (std::size_t r = 0; r < kAllRegions.size(); ++r) {
        std::vector<Point> pts;
        for (std::size_t i : landmark_indices(kAllRegions[r])) pts.push_back(landmarks.points[i]);
        out[r] = rasterize_hull(kAllRegions[r], pts, width, height);
    }
    RegionSpec& face = out[3];
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t i = 0; i < face.membership.size(); ++i) face.membership[i] |= out[r].membership[i];
    face.refresh();
    return out;
}

std::array<double, 4> region_means(const ForgeryMask& mask, const std::array<RegionSpec, 4>& regions) {
    std::array<double, 4> means{};
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const RegionSpec& spec = regions[r];
        if (spec.width != mask.width || spec.height != mask.height)
            throw Error(Errc::DimensionMismatch, "region and mask differ in size");
        if (spec.pixel_count == 0)
            throw Error(Errc::EmptyRegion, std::string(to_string(spec.name)) + " has no pixels");
        double sum = 0.0;
        for (std::size_t i = 0; i < spec.membership.size(); ++i)
            if (spec.membership[i]) sum += mask.data[i];
        means[r] = sum / static_cast<double>(spec.pixel_count);
    }
    return means;
}

RegionList extract_forgery_regions(const ForgeryMask& mask, const std::array<RegionSpec, 4>& regions,
                                   double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw Error(Errc::InvalidArgument, "theta must lie in (0,1)");
    const auto means = region_means(mask, regions);
    RegionList out;
    for (std::size_t r = 0; r < regions.size(); ++r)
        if (means[r] > theta) out.push_back(regions[r].name);
    return out;
}

std::optional<Region> select_region(const RegionList& candidates, Rng& rng) {
    if (candidates.empty()) return std::nullopt;
    return candidates[rng.index(candidates.size())];
}

}  // namespace forgeprompt::regions
