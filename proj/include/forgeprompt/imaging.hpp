#pragma once

#include <array>
#include <span>
#include <vector>

#include "forgeprompt/image.hpp"

namespace forgeprompt::imaging {

// ---------------------------------------------------------------------------
// Colour
// ---------------------------------------------------------------------------

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_grayscale(const ImageBuffer& img);

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// sRGB (D65) -> linear RGB -> XYZ -> CIE L*a*b*.
Lab srgb_to_lab(double r, double g, double b);
/// Inverse of srgb_to_lab. Output is not clamped; out-of-gamut colours
/// come back outside [0,1].
std::array<double, 3> lab_to_srgb(const Lab& lab);

LabImage rgb_to_lab(const ImageBuffer& img);
/// Inverse conversion, clamped to [0,1].
ImageBuffer lab_to_rgb(const LabImage& lab);

struct ChannelStats {
    std::array<double, 3> mean{};
    std::array<double, 3> stddev{};  // population
};

ChannelStats channel_stats(const LabImage& lab);

// ---------------------------------------------------------------------------
// Sharpness
// ---------------------------------------------------------------------------

/// 4-neighbour Laplacian with replicate borders. Needs width, height >= 3.
ResponseMap laplacian_response(const GrayImage& img);

/// Population variance. Throws EmptyInput on an empty span.
double variance(std::span<const double> values);

// ---------------------------------------------------------------------------
// Structural similarity
// ---------------------------------------------------------------------------

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over all fully-contained Gaussian windows ("valid" filtering).
double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

// ---------------------------------------------------------------------------
// Gray-level co-occurrence
// ---------------------------------------------------------------------------

struct Offset {
    int dx = 0;
    int dy = 0;
};

/// right, down, left, up
inline constexpr std::array<Offset, 4> kOrthogonalOffsets{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

/// [0,1] intensity -> 8-bit level, round-half-up, clamped.
int quantize_level(double v);

class Glcm {
public:
    static constexpr int kLevels = 256;

    Glcm();

    void add(int i, int j, double weight = 1.0);
    /// Divides by the total pair count. Throws EmptyInput if nothing was added.
    void normalize();

    bool normalized() const { return normalized_; }
    /// Probability when normalized, raw count otherwise.
    double at(int i, int j) const;
    double count(int i, int j) const { return counts_[idx(i, j)]; }
    double total() const { return total_; }
    std::span<const double> matrix() const;

private:
    static std::size_t idx(int i, int j) { return static_cast<std::size_t>(i) * kLevels + j; }

    std::vector<double> counts_;
    std::vector<double> probs_;
    double total_ = 0.0;
    bool normalized_ = false;
};

/// Co-occurrence over the given unit offsets, summed across offsets then
/// normalized. With `symmetric`, each pair also counts as (j,i).
Glcm glcm(const GrayImage& img, std::span<const Offset> offsets = kOrthogonalOffsets,
          bool symmetric = false);

/// sum_{i,j} |i-j|^2 P(i,j). Throws NotNormalized for raw matrices.
double glcm_contrast(const Glcm& g);

}  // namespace forgeprompt::imaging
