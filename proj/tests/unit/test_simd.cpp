#include <gtest/gtest.h>

#include <cmath>

#include "forgeprompt/imaging.hpp"
#include "forgeprompt/regions.hpp"
#include "forgeprompt/rng.hpp"
#include "forgeprompt/simd/kernels.hpp"

using namespace forgeprompt;
using forgeprompt::simd::Backend;

namespace {

std::vector<double> randoms(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform() * 2.0 - 0.5;
    return v;
}

class Backends : public ::testing::TestWithParam<Backend> {
protected:
    void SetUp() override { saved_ = simd::kernels().backend; }
    void TearDown() override { simd::set_backend(saved_); }
    Backend saved_ = Backend::Scalar;
};

}  // namespace

// Sizes around the vector widths catch tail handling.
TEST_P(Backends, ElementwiseKernelsAreBitIdentical) {
    const auto& ref = simd::detail::scalar_table();
    const auto& k = simd::table_for(GetParam());
    Rng rng(1);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 100u, 257u}) {
        const auto a = randoms(3 * n, rng), b = randoms(3 * n, rng);
        std::vector<double> o1(n), o2(n);
        ref.abs_diff_mean3(a.data(), b.data(), o1.data(), n);
        k.abs_diff_mean3(a.data(), b.data(), o2.data(), n);
        EXPECT_EQ(o1, o2) << n;

        std::vector<double> l1(3 * n), l2(3 * n);
        ref.lerp(a.data(), b.data(), 0.9, 1.0 - 0.9, l1.data(), 3 * n);
        k.lerp(a.data(), b.data(), 0.9, 1.0 - 0.9, l2.data(), 3 * n);
        EXPECT_EQ(l1, l2) << n;

        const std::size_t m = n + 2;
        const auto up = randoms(m, rng), mid = randoms(m, rng), down = randoms(m, rng);
        std::vector<double> r1(m, 7.0), r2(m, 7.0);
        ref.laplacian_row(up.data(), mid.data(), down.data(), r1.data(), m);
        k.laplacian_row(up.data(), mid.data(), down.data(), r2.data(), m);
        EXPECT_EQ(r1, r2) << n;

        auto y1 = randoms(n, rng);
        auto y2 = y1;
        const auto x = randoms(n, rng);
        ref.axpy(-0.37, x.data(), y1.data(), n);
        k.axpy(-0.37, x.data(), y2.data(), n);
        EXPECT_EQ(y1, y2) << n;
    }
}

TEST_P(Backends, DotAgreesWithinRounding) {
    const auto& ref = simd::detail::scalar_table();
    const auto& k = simd::table_for(GetParam());
    Rng rng(2);
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 31u, 768u, 1001u}) {
        const auto a = randoms(n, rng), b = randoms(n, rng);
        const double r = ref.dot(a.data(), b.data(), n), v = k.dot(a.data(), b.data(), n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]);
        EXPECT_LE(std::fabs(r - v), 1e-12 * mag) << n;
    }
}

TEST_P(Backends, HighLevelResultsDoNotDependOnBackend) {
    Rng rng(3);
    ImageBuffer a(19, 13), b(19, 13);
    for (double& v : a.data) v = rng.uniform();
    for (double& v : b.data) v = rng.uniform();
    GrayImage g(19, 13);
    for (double& v : g.data) v = rng.uniform();

    simd::set_backend(Backend::Scalar);
    const auto m_ref = regions::generate_mask(a, b);
    const auto l_ref = imaging::laplacian_response(g);
    simd::set_backend(GetParam());
    EXPECT_EQ(simd::kernels().backend, GetParam());
    EXPECT_EQ(regions::generate_mask(a, b), m_ref);
    EXPECT_EQ(imaging::laplacian_response(g), l_ref);
}

INSTANTIATE_TEST_SUITE_P(Available, Backends, ::testing::ValuesIn(simd::available_backends()),
                         [](const auto& info) { return std::string(simd::to_string(info.param)); });

TEST(Dispatch, ScalarAlwaysAvailable) {
    const auto all = simd::available_backends();
    ASSERT_FALSE(all.empty());
    EXPECT_EQ(all.front(), Backend::Scalar);
}
