#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "forgeprompt/blending.hpp"
#include "forgeprompt/image.hpp"
#include "forgeprompt/rng.hpp"

namespace forgeprompt::typing {

enum class ForgeryType { ColorDifference, Blur, StructureAbnormal, TextureAbnormal, BlendBoundary };

inline constexpr std::array<ForgeryType, 5> kAllTypes{ForgeryType::ColorDifference, ForgeryType::Blur,
                                                      ForgeryType::StructureAbnormal,
                                                      ForgeryType::TextureAbnormal, ForgeryType::BlendBoundary};

/// Lowercase phrase used in prompts, e.g. "color difference".
std::string_view phrase(ForgeryType t) noexcept;
/// snake_case key used in the manifest, e.g. "color_difference".
std::string_view key(ForgeryType t) noexcept;
std::optional<ForgeryType> parse_phrase(std::string_view text) noexcept;

struct TypeThresholds {
    double theta_c_mean = 1.0;
    double theta_c_std = 0.5;
    double theta_blur = 100.0;  // Laplacian variance on 0-255 intensities
    double theta_ssim = 0.97;
    double theta_texture = 0.7;

    void validate() const;
};

struct ColorVerdict {
    bool verdict = false;
    double mean_diff = 0.0;  // m: average over L,a,b of |mean_r - mean_f|
    double std_diff = 0.0;   // s: average over L,a,b of |std_r - std_f|
};

struct BlurVerdict {
    bool verdict = false;
    double real_var = 0.0;
    double fake_var = 0.0;
};

struct StructureVerdict {
    bool verdict = false;
    double ssim = 1.0;
};

struct TextureVerdict {
    bool verdict = false;
    double real_contrast = 0.0;
    double fake_contrast = 0.0;
};

ColorVerdict color_difference(const ImageBuffer& real, const ImageBuffer& fake, const TypeThresholds& th);
BlurVerdict blur_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th);
StructureVerdict structure_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th);
TextureVerdict texture_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th);

struct TypeReport {
    ColorVerdict color;
    BlurVerdict blur;
    StructureVerdict structure;
    TextureVerdict texture;

    /// Measured types with a True verdict, in kAllTypes order.
    std::vector<ForgeryType> positives() const;
};

/// Runs all four measured decisions on equally sized RGB crops.
TypeReport measure_types(const ImageBuffer& real, const ImageBuffer& fake, const TypeThresholds& th);

struct TypeDecision {
    TypeReport report;
    std::optional<ForgeryType> selected;
};

/// Alpha blending always yields BlendBoundary (verdicts still measured).
/// Poisson picks uniformly among the positive verdicts, or nothing.
TypeDecision decide_types(const ImageBuffer& real, const ImageBuffer& fake, blending::MethodKind method,
                          const TypeThresholds& th, Rng& rng);

}  // namespace forgeprompt::typing
