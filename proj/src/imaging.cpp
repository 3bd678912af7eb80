#include "forgeprompt/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::imaging {
namespace {

// sRGB primaries, D65 white.
constexpr double kRgbToXyz[3][3] = {
    {0.412453, 0.357580, 0.180423},
    {0.212671, 0.715160, 0.072169},
    {0.019334, 0.119193, 0.950227},
};
constexpr double kWhite[3] = {0.95047, 1.0, 1.08883};

constexpr double kDelta = 6.0 / 29.0;
constexpr double kDelta3 = kDelta * kDelta * kDelta;

double srgb_decode(double c) {
    return c > 0.04045 ? std::pow((c + 0.055) / 1.055, 2.4) : c / 12.92;
}

double srgb_encode(double c) {
    return c > 0.0031308 ? 1.055 * std::pow(c, 1.0 / 2.4) - 0.055 : 12.92 * c;
}

double lab_f(double t) {
    return t > kDelta3 ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

const std::array<std::array<double, 3>, 3>& xyz_to_rgb() {
    // Inverse of kRgbToXyz by cofactors.
    static const auto inv = [] {
        const auto& m = kRgbToXyz;
        std::array<std::array<double, 3>, 3> r{};
        double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
        r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
        r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
        r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
        r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
        r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
        r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
        r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
        r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
        return r;
    }();
    return inv;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> w(size);
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - half;
        w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable "valid" filter: output is (W-k+1) x (H-k+1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
    const int ks = static_cast<int>(k.size());
    const int ow = w - ks + 1;
    const int oh = h - ks + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            const double* row = src.data() + static_cast<std::size_t>(y) * w + x;
            for (int i = 0; i < ks; ++i) s += k[i] * row[i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < ks; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

}  // namespace

GrayImage to_grayscale(const ImageBuffer& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double* p = img.data.data() + 3 * i;
        out.data[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

Lab srgb_to_lab(double r, double g, double b) {
    const double lin[3] = {srgb_decode(r), srgb_decode(g), srgb_decode(b)};
    double f[3];
    for (int i = 0; i < 3; ++i) {
        const double xyz = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] + kRgbToXyz[i][2] * lin[2];
        f[i] = lab_f(xyz / kWhite[i]);
    }
    return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

std::array<double, 3> lab_to_srgb(const Lab& lab) {
    const double fy = (lab.L + 16.0) / 116.0;
    const double fx = fy + lab.a / 500.0;
    const double fz = fy - lab.b / 200.0;
    const double xyz[3] = {lab_f_inv(fx) * kWhite[0], lab_f_inv(fy) * kWhite[1], lab_f_inv(fz) * kWhite[2]};
    const auto& m = xyz_to_rgb();
    std::array<double, 3> rgb{};
    for (int i = 0; i < 3; ++i)
        rgb[i] = srgb_encode(m[i][0] * xyz[0] + m[i][1] * xyz[1] + m[i][2] * xyz[2]);
    return rgb;
}

LabImage rgb_to_lab(const ImageBuffer& img) {
    LabImage out{img.width, img.height, std::vector<double>(img.data.size())};
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double* p = img.data.data() + 3 * i;
        const Lab lab = srgb_to_lab(p[0], p[1], p[2]);
        out.data[3 * i] = lab.L;
        out.data[3 * i + 1] = lab.a;
        out.data[3 * i + 2] = lab.b;
    }
    return out;
}

ImageBuffer lab_to_rgb(const LabImage& lab) {
    ImageBuffer out(lab.width, lab.height);
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        const auto rgb = lab_to_srgb({lab.data[3 * i], lab.data[3 * i + 1], lab.data[3 * i + 2]});
        for (int c = 0; c < 3; ++c) out.data[3 * i + c] = std::clamp(rgb[c], 0.0, 1.0);
    }
    return out;
}

ChannelStats channel_stats(const LabImage& lab) {
    const std::size_t n = static_cast<std::size_t>(lab.width) * lab.height;
    if (n == 0) throw Error(Errc::EmptyInput, "channel_stats on empty image");
    ChannelStats st;
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += lab.data[3 * i + c];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = lab.data[3 * i + c] - mean;
            ss += d * d;
        }
        st.mean[c] = mean;
        st.stddev[c] = std::sqrt(ss / static_cast<double>(n));
    }
    return st;
}

ResponseMap laplacian_response(const GrayImage& img) {
    const int w = img.width;
    const int h = img.height;
    if (w < 3 || h < 3)
        throw Error(Errc::ImageTooSmall,
                    "laplacian needs at least 3x3, got " + std::to_string(w) + "x" + std::to_string(h));
    ResponseMap out(w, h);
    const auto& k = simd::kernels();
    auto row = [&](int y) { return img.data.data() + static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w; };
    for (int y = 0; y < h; ++y) {
        const double* up = row(y - 1);
        const double* mid = row(y);
        const double* down = row(y + 1);
        double* dst = out.data.data() + static_cast<std::size_t>(y) * w;
        k.laplacian_row(up, mid, down, dst, static_cast<std::size_t>(w));
        // replicate padding: the missing horizontal neighbour is the pixel itself
        dst[0] = (up[0] + down[0]) + (mid[0] + mid[1]) - 4.0 * mid[0];
        dst[w - 1] = (up[w - 1] + down[w - 1]) + (mid[w - 2] + mid[w - 1]) - 4.0 * mid[w - 1];
    }
    return out;
}

double variance(std::span<const double> values) {
    if (values.empty()) throw Error(Errc::EmptyInput, "variance of empty input");
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    return m2 / static_cast<double>(n);
}

double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& p) {
    if (a.width != b.width || a.height != b.height)
        throw Error(Errc::DimensionMismatch, "ssim inputs differ in size");
    if (a.width < p.window || a.height < p.window)
        throw Error(Errc::ImageTooSmall, "ssim needs at least " + std::to_string(p.window) + "x" +
                                             std::to_string(p.window));
    const auto k = gaussian_kernel(p.window, p.sigma);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    const std::size_t n = a.data.size();
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a.data[i] * a.data[i];
        bb[i] = b.data[i] * b.data[i];
        ab[i] = a.data[i] * b.data[i];
    }
    const auto mu_a = filter_valid(a.data, a.width, a.height, k);
    const auto mu_b = filter_valid(b.data, a.width, a.height, k);
    const auto e_aa = filter_valid(aa, a.width, a.height, k);
    const auto e_bb = filter_valid(bb, a.width, a.height, k);
    const auto e_ab = filter_valid(ab, a.width, a.height, k);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double var_a = e_aa[i] - ma * ma;
        const double var_b = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

int quantize_level(double v) {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<int>(std::clamp(scaled, 0.0, 255.0));
}

Glcm::Glcm()
    : counts_(static_cast<std::size_t>(kLevels) * kLevels, 0.0) {}

void Glcm::add(int i, int j, double weight) {
    counts_[idx(i, j)] += weight;
    total_ += weight;
    normalized_ = false;
    probs_.clear();
}

void Glcm::normalize() {
    if (!(total_ > 0.0)) throw Error(Errc::EmptyInput, "glcm has no pairs");
    probs_.resize(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) probs_[i] = counts_[i] / total_;
    normalized_ = true;
}

double Glcm::at(int i, int j) const {
    return normalized_ ? probs_[idx(i, j)] : counts_[idx(i, j)];
}

std::span<const double> Glcm::matrix() const {
    return normalized_ ? std::span<const double>(probs_) : std::span<const double>(counts_);
}

Glcm glcm(const GrayImage& img, std::span<const Offset> offsets, bool symmetric) {
    if (img.width < 2 || img.height < 2) throw Error(Errc::ImageTooSmall, "glcm needs at least 2x2");
    std::vector<int> q(img.data.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantize_level(img.data[i]);

    Glcm g;
    for (const Offset& o : offsets) {
        for (int y = 0; y < img.height; ++y) {
            const int y2 = y + o.dy;
            if (y2 < 0 || y2 >= img.height) continue;
            for (int x = 0; x < img.width; ++x) {
                const int x2 = x + o.dx;
                if (x2 < 0 || x2 >= img.width) continue;
                const int i = q[static_cast<std::size_t>(y) * img.width + x];
                const int j = q[static_cast<std::size_t>(y2) * img.width + x2];
                g.add(i, j);
                if (symmetric) g.add(j, i);
            }
        }
    }
    g.normalize();
    return g;
}

double glcm_contrast(const Glcm& g) {
    if (!g.normalized()) throw Error(Errc::NotNormalized, "glcm_contrast needs a normalized matrix");
    // Weighted integer counts first, one division at the end.
    double weighted = 0.0;
    for (int i = 0; i < Glcm::kLevels; ++i)
        for (int j = 0; j < Glcm::kLevels; ++j) {
            const double c = g.count(i, j);
            if (c != 0.0) weighted += static_cast<double>((i - j) * (i - j)) * c;
        }
    return weighted / g.total();
}

}  // namespace forgeprompt::imaging
