#include "forgeprompt/typing.hpp"

#include <cmath>

#include "forgeprompt/imaging.hpp"

namespace forgeprompt::typing {

std::string_view phrase(ForgeryType t) noexcept {
    switch (t) {
        case ForgeryType::ColorDifference: return "color difference";
        case ForgeryType::Blur: return "blur";
        case ForgeryType::StructureAbnormal: return "structure abnormal";
        case ForgeryType::TextureAbnormal: return "texture abnormal";
        case ForgeryType::BlendBoundary: return "blend boundary";
    }
    return "unknown";
}

std::string_view key(ForgeryType t) noexcept {
    switch (t) {
        case ForgeryType::ColorDifference: return "color_difference";
        case ForgeryType::Blur: return "blur";
        case ForgeryType::StructureAbnormal: return "structure_abnormal";
        case ForgeryType::TextureAbnormal: return "texture_abnormal";
        case ForgeryType::BlendBoundary: return "blend_boundary";
    }
    return "unknown";
}

std::optional<ForgeryType> parse_phrase(std::string_view text) noexcept {
    for (ForgeryType t : kAllTypes)
        if (phrase(t) == text) return t;
    return std::nullopt;
}

void TypeThresholds::validate() const {
    if (!(theta_c_mean > 0.0 && theta_c_std > 0.0 && theta_blur > 0.0 && theta_texture > 0.0))
        throw Error(Errc::Config, "type thresholds must be positive");
    if (!(theta_ssim > 0.0 && theta_ssim <= 1.0)) throw Error(Errc::Config, "types.theta_ssim must lie in (0,1]");
}

ColorVerdict color_difference(const ImageBuffer& real, const ImageBuffer& fake, const TypeThresholds& th) {
    if (real.width != fake.width || real.height != fake.height)
        throw Error(Errc::DimensionMismatch, "color crops differ in size");
    const auto r = imaging::channel_stats(imaging::rgb_to_lab(real));
    const auto f = imaging::channel_stats(imaging::rgb_to_lab(fake));
    ColorVerdict v;
    for (int c = 0; c < 3; ++c) {
        v.mean_diff += std::fabs(r.mean[c] - f.mean[c]);
        v.std_diff += std::fabs(r.stddev[c] - f.stddev[c]);
    }
    v.mean_diff /= 3.0;
    v.std_diff /= 3.0;
    v.verdict = v.mean_diff > th.theta_c_mean && v.std_diff > th.theta_c_std;
    return v;
}

BlurVerdict blur_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th) {
    auto to_255 = [](const GrayImage& g) {
        GrayImage out = g;
        for (double& v : out.data) v *= 255.0;
        return out;
    };
    BlurVerdict v;
    v.real_var = imaging::variance(imaging::laplacian_response(to_255(real)).values());
    v.fake_var = imaging::variance(imaging::laplacian_response(to_255(fake)).values());
    v.verdict = v.real_var > v.fake_var && (v.real_var - v.fake_var) > th.theta_blur;
    return v;
}

StructureVerdict structure_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th) {
    StructureVerdict v;
    v.ssim = imaging::ssim(real, fake);
    v.verdict = v.ssim < th.theta_ssim;
    return v;
}

TextureVerdict texture_decision(const GrayImage& real, const GrayImage& fake, const TypeThresholds& th) {
    TextureVerdict v;
    v.real_contrast = imaging::glcm_contrast(imaging::glcm(real));
    v.fake_contrast = imaging::glcm_contrast(imaging::glcm(fake));
    v.verdict = v.real_contrast > v.fake_contrast && (v.real_contrast - v.fake_contrast) > th.theta_texture;
    return v;
}

std::vector<ForgeryType> TypeReport::positives() const {
    std::vector<ForgeryType> out;
    if (color.verdict) out.push_back(ForgeryType::ColorDifference);
    if (blur.verdict) out.push_back(ForgeryType::Blur);
    if (structure.verdict) out.push_back(ForgeryType::StructureAbnormal);
    if (texture.verdict) out.push_back(ForgeryType::TextureAbnormal);
    return out;
}

TypeReport measure_types(const ImageBuffer& real, const ImageBuffer& fake, const TypeThresholds& th) {
    if (real.width != fake.width || real.height != fake.height)
        throw Error(Errc::DimensionMismatch, "type crops differ in size");
    const GrayImage gr = imaging::to_grayscale(real);
    const GrayImage gf = imaging::to_grayscale(fake);
    TypeReport rep;
    rep.color = color_difference(real, fake, th);
    rep.blur = blur_decision(gr, gf, th);
    rep.structure = structure_decision(gr, gf, th);
    rep.texture = texture_decision(gr, gf, th);
    return rep;
}

TypeDecision decide_types(const ImageBuffer& real, const ImageBuffer& fake, blending::MethodKind method,
                          const TypeThresholds& th, Rng& rng) {
    TypeDecision d;
    d.report = measure_types(real, fake, th);
    if (method == blending::MethodKind::Alpha) {
        d.selected = ForgeryType::BlendBoundary;
        return d;
    }
    const auto pos = d.report.positives();
    if (!pos.empty()) d.selected = pos[rng.index(pos.size())];
    return d;
}

}  // namespace forgeprompt::typing
