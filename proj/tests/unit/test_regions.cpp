#include <gtest/gtest.h>

#include <cmath>

#include "fixture.hpp"
#include "forgeprompt/regions.hpp"

using namespace forgeprompt;
using namespace forgeprompt::regions;

namespace {

ImageBuffer random_image(int w, int h, Rng& rng) {
    ImageBuffer img(w, h);
    for (double& v : img.data) v = rng.uniform();
    return img;
}

// Scanline oracle: a pixel is in a convex polygon if it is on the inner side
// of every edge (polygon given counter-clockwise in image coordinates).
std::size_t scanline_count(const std::vector<Point>& hull, int w, int h) {
    std::size_t n = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool inside = true;
            for (std::size_t i = 0; i < hull.size() && inside; ++i) {
                const Point a = hull[i], b = hull[(i + 1) % hull.size()];
                const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
                inside = cross >= -1e-9;
            }
            n += inside;
        }
    return n;
}

}  // namespace

TEST(Mask, IdenticalPairIsZero) {
    Rng rng(1);
    const auto a = random_image(16, 16, rng);
    for (double v : generate_mask(a, a).data) EXPECT_EQ(v, 0.0);
}

TEST(Mask, BlackWhiteIsOne) {
    for (double v : generate_mask(ImageBuffer(5, 4, 0.0), ImageBuffer(5, 4, 1.0)).data) EXPECT_EQ(v, 1.0);
}

TEST(Mask, NestedLoopOracleAndSymmetry) {
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_image(8, 8, rng), b = random_image(8, 8, rng);
        const auto m = generate_mask(a, b);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                const double want = (std::fabs(a.at(x, y, 0) - b.at(x, y, 0)) + std::fabs(a.at(x, y, 1) - b.at(x, y, 1)) +
                                     std::fabs(a.at(x, y, 2) - b.at(x, y, 2))) /
                                    3.0;
                EXPECT_EQ(m.at(x, y), want);
            }
        EXPECT_EQ(m, generate_mask(b, a));
    }
}

TEST(Mask, DimensionMismatch) {
    EXPECT_THROW(generate_mask(ImageBuffer(4, 4), ImageBuffer(4, 5)), Error);
}

TEST(Hull, SquareFillsExactly) {
    const std::vector<Point> sq{{2, 3}, {7, 3}, {7, 9}, {2, 9}, {4, 5}};
    const auto r = rasterize_hull(Region::Mouth, sq, 12, 12);
    EXPECT_EQ(r.pixel_count, 6u * 7u);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) EXPECT_EQ(r.contains(x, y), x >= 2 && x <= 7 && y >= 3 && y <= 9);
    EXPECT_EQ(r.bbox.x0, 2);
    EXPECT_EQ(r.bbox.y1, 9);
}

TEST(Hull, DropsInteriorAndCollinearPoints) {
    const auto hull = convex_hull({{0, 0}, {2, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}});
    EXPECT_EQ(hull.size(), 4u);
}

TEST(Hull, DegenerateThrows) {
    const std::vector<Point> line{{0, 0}, {3, 3}, {6, 6}};
    EXPECT_THROW(rasterize_hull(Region::Nose, line, 10, 10), Error);
}

TEST(Regions, TemplateMatchesScanlineOracle) {
    const auto lm = fixture::face_landmarks(96, 96);
    const auto regs = derive_regions(lm, 96, 96);
    for (std::size_t r = 0; r < 3; ++r) {
        std::vector<Point> pts;
        for (auto i : landmark_indices(kAllRegions[r])) pts.push_back(lm.points[i]);
        EXPECT_EQ(regs[r].pixel_count, scanline_count(convex_hull(pts), 96, 96)) << to_string(kAllRegions[r]);
    }
}

TEST(Regions, FaceIsSupersetOfOrgans) {
    const auto regs = derive_regions(fixture::face_landmarks(80, 90), 80, 90);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t i = 0; i < regs[r].membership.size(); ++i)
            EXPECT_TRUE(!regs[r].membership[i] || regs[3].membership[i]) << i;
}

TEST(Regions, LandmarkValidation) {
    auto lm = fixture::face_landmarks(50, 50);
    EXPECT_NO_THROW(lm.validate(50, 50, 0.0));
    lm.points[5].x = 51.5;
    EXPECT_THROW(lm.validate(50, 50, 1.0), Error);
    EXPECT_NO_THROW(lm.validate(50, 50, 3.0));
}

TEST(Regions, NamesRoundTrip) {
    for (auto r : kAllRegions) EXPECT_EQ(parse_region(to_string(r)), r);
    EXPECT_FALSE(parse_region("ears"));
}

TEST(Extract, ZeroMaskGivesNothing) {
    const auto regs = derive_regions(fixture::face_landmarks(64, 64), 64, 64);
    EXPECT_TRUE(extract_forgery_regions(ForgeryMask(64, 64, 0.0), regs, 0.1).empty());
}

TEST(Extract, MouthOnlyMask) {
    const auto regs = derive_regions(fixture::face_landmarks(96, 96), 96, 96);
    ForgeryMask m(96, 96, 0.0);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = regs[0].membership[i];
    const auto means = region_means(m, regs);
    EXPECT_EQ(means[0], 1.0);
    EXPECT_EQ(means[1], 0.0);
    EXPECT_EQ(means[2], 0.0);
    EXPECT_NEAR(means[3], double(regs[0].pixel_count) / regs[3].pixel_count, 1e-15);
    ASSERT_LT(means[3], 0.5);
    EXPECT_EQ(extract_forgery_regions(m, regs, 0.5), (RegionList{Region::Mouth}));
    EXPECT_EQ(extract_forgery_regions(m, regs, means[3] / 2), (RegionList{Region::Mouth, Region::Face}));
}

TEST(Extract, ThetaAboveMaxGivesNothing) {
    Rng rng(3);
    const auto regs = derive_regions(fixture::face_landmarks(64, 64), 64, 64);
    ForgeryMask m(64, 64);
    for (double& v : m.data) v = 0.4 * rng.uniform();
    EXPECT_TRUE(extract_forgery_regions(m, regs, 0.41).empty());
}

TEST(Extract, Errors) {
    auto regs = derive_regions(fixture::face_landmarks(64, 64), 64, 64);
    EXPECT_THROW(extract_forgery_regions(ForgeryMask(64, 64), regs, 0.0), Error);
    EXPECT_THROW(extract_forgery_regions(ForgeryMask(64, 64), regs, 1.0), Error);
    EXPECT_THROW(extract_forgery_regions(ForgeryMask(60, 64), regs, 0.5), Error);
    std::fill(regs[1].membership.begin(), regs[1].membership.end(), 0);
    regs[1].refresh();
    EXPECT_THROW(extract_forgery_regions(ForgeryMask(64, 64), regs, 0.5), Error);
}

TEST(Select, SingleAndEmpty) {
    Rng rng(4);
    EXPECT_EQ(select_region({Region::Eyes}, rng), Region::Eyes);
    EXPECT_FALSE(select_region({}, rng));
}

TEST(Select, ReproducibleAndUniform) {
    const RegionList list{Region::Mouth, Region::Nose, Region::Eyes};
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(select_region(list, a), select_region(list, b));

    Rng rng(7);
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<int>(*select_region(list, rng))];
    const double expect = n / 3.0, sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (int r = 0; r < 3; ++r) EXPECT_LT(std::fabs(counts[r] - expect), 3 * sigma);
    // chi-square, 2 dof, p = 0.001
    double chi = 0.0;
    for (int r = 0; r < 3; ++r) chi += (counts[r] - expect) * (counts[r] - expect) / expect;
    EXPECT_LT(chi, 13.82);
}
