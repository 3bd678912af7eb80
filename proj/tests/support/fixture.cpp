#include "fixture.hpp"

#include <cmath>
#include <numbers>

#include "forgeprompt/imaging.hpp"
#include "forgeprompt/io.hpp"
#include "forgeprompt/rng.hpp"

namespace fixture {

using namespace forgeprompt;

regions::LandmarkSet face_landmarks(int w, int h) {
    regions::LandmarkSet lm;
    auto& p = lm.points;
    const double pi = std::numbers::pi;
    // jaw 0..16: lower half ellipse
    for (int i = 0; i <= 16; ++i) {
        const double t = pi * i / 16.0;
        p[i] = {w * (0.5 - 0.36 * std::cos(t)), h * (0.32 + 0.58 * std::sin(t))};
    }
    for (int i = 0; i < 5; ++i) {
        p[17 + i] = {w * (0.22 + 0.045 * i), h * (0.30 - 0.02 * std::sin(pi * i / 4.0))};
        p[22 + i] = {w * (0.60 + 0.045 * i), h * (0.30 - 0.02 * std::sin(pi * i / 4.0))};
    }
    for (int i = 0; i < 4; ++i) p[27 + i] = {w * 0.5, h * (0.36 + 0.07 * i)};
    for (int i = 0; i < 5; ++i) p[31 + i] = {w * (0.41 + 0.045 * i), h * (0.60 + 0.015 * (i == 2))};
    auto eye = [&](int first, double cx) {
        for (int i = 0; i < 6; ++i) {
            const double t = 2.0 * pi * i / 6.0;
            p[first + i] = {w * (cx - 0.07 * std::cos(t)), h * (0.41 - 0.035 * std::sin(t))};
        }
    };
    eye(36, 0.33);
    eye(42, 0.67);
    for (int i = 0; i < 12; ++i) {
        const double t = 2.0 * pi * i / 12.0;
        p[48 + i] = {w * (0.5 - 0.16 * std::cos(t)), h * (0.76 - 0.075 * std::sin(t))};
    }
    for (int i = 0; i < 8; ++i) {
        const double t = 2.0 * pi * i / 8.0;
        p[60 + i] = {w * (0.5 - 0.10 * std::cos(t)), h * (0.76 - 0.03 * std::sin(t))};
    }
    return lm;
}

ImageBuffer face_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    const double hue = rng.uniform();
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w - 0.5, v = (y + 0.5) / h - 0.55;
            const double shade = 0.55 + 0.25 * std::exp(-(u * u + v * v) * 6.0);
            const double grain = 0.12 * (rng.uniform() - 0.5) + 0.08 * std::sin(1.3 * x + 0.7 * y);
            img.at(x, y, 0) = std::clamp(shade * (0.95 + 0.05 * hue) + grain, 0.0, 1.0);
            img.at(x, y, 1) = std::clamp(shade * 0.78 + grain, 0.0, 1.0);
            img.at(x, y, 2) = std::clamp(shade * (0.62 + 0.1 * hue) + grain, 0.0, 1.0);
        }
    return img;
}

namespace {

using Edit = void (*)(ImageBuffer&, const std::array<regions::RegionSpec, 4>&, Rng&);

void for_members(ImageBuffer& img, const regions::RegionSpec& r, auto&& fn) {
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (r.contains(x, y)) fn(x, y);
}

void tint(ImageBuffer& img, const regions::RegionSpec& r, double dr, double dg, double db) {
    for_members(img, r, [&](int x, int y) {
        img.at(x, y, 0) = std::clamp(img.at(x, y, 0) + dr, 0.0, 1.0);
        img.at(x, y, 1) = std::clamp(img.at(x, y, 1) + dg, 0.0, 1.0);
        img.at(x, y, 2) = std::clamp(img.at(x, y, 2) + db, 0.0, 1.0);
    });
}

void box_blur(ImageBuffer& img, const regions::RegionSpec& r, int rad) {
    const ImageBuffer src = img;
    for_members(img, r, [&](int x, int y) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            int n = 0;
            for (int dy = -rad; dy <= rad; ++dy)
                for (int dx = -rad; dx <= rad; ++dx) {
                    const int xx = std::clamp(x + dx, 0, img.width - 1), yy = std::clamp(y + dy, 0, img.height - 1);
                    s += src.at(xx, yy, c);
                    ++n;
                }
            img.at(x, y, c) = s / n;
        }
    });
}

void shift(ImageBuffer& img, const regions::RegionSpec& r, int sx, int sy) {
    const ImageBuffer src = img;
    for_members(img, r, [&](int x, int y) {
        const int xx = std::clamp(x + sx, 0, img.width - 1), yy = std::clamp(y + sy, 0, img.height - 1);
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = src.at(xx, yy, c);
    });
}

void stripes(ImageBuffer& img, const regions::RegionSpec& r, double amp) {
    for_members(img, r, [&](int x, int y) {
        const double d = ((x / 2 + y / 3) % 2 == 0) ? amp : -amp;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = std::clamp(img.at(x, y, c) + d, 0.0, 1.0);
    });
}

constexpr std::size_t kMouth = 0, kNose = 1, kEyes = 2, kFace = 3;

}  // namespace

fs::path write_pipeline_fixture(const fs::path& root, int workers) {
    constexpr int kW = 96, kH = 96;
    const auto lm = face_landmarks(kW, kH);
    const auto regs = regions::derive_regions(lm, kW, kH);

    const Edit edits[10] = {
        [](ImageBuffer& f, const auto& r, Rng&) { tint(f, r[kMouth], 0.25, -0.05, -0.05); },
        [](ImageBuffer& f, const auto& r, Rng&) { box_blur(f, r[kEyes], 3); },
        [](ImageBuffer& f, const auto& r, Rng&) { shift(f, r[kNose], 3, 2); },
        [](ImageBuffer& f, const auto& r, Rng&) { box_blur(f, r[kFace], 2); },
        [](ImageBuffer&, const auto&, Rng&) {},  // identical pair
        [](ImageBuffer& f, const auto& r, Rng&) {
            tint(f, r[kMouth], -0.2, -0.1, 0.05);
            tint(f, r[kNose], 0.1, 0.1, 0.1);
        },
        [](ImageBuffer& f, const auto& r, Rng& rng) {
            for_members(f, r[kFace], [&](int x, int y) {
                for (int c = 0; c < 3; ++c) f.at(x, y, c) = std::clamp(f.at(x, y, c) + 0.4 * (rng.uniform() - 0.5), 0.0, 1.0);
            });
        },
        [](ImageBuffer& f, const auto& r, Rng&) { tint(f, r[kFace], 0.12, 0.08, -0.1); },
        [](ImageBuffer& f, const auto& r, Rng&) { shift(f, r[kEyes], -4, 5); },
        [](ImageBuffer& f, const auto& r, Rng&) {
            stripes(f, r[kMouth], 0.12);
            box_blur(f, r[kNose], 3);
        },
    };

    for (int i = 0; i < 10; ++i) {
        const std::string stem = "pair_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        const ImageBuffer real = face_image(kW, kH, 1000 + i);
        ImageBuffer fake = real;
        Rng rng(77 + i);
        edits[i](fake, regs, rng);
        // encoder residue: fakes never match the real frame exactly
        if (i != 4)
            for (double& v : fake.data) v = std::clamp(v + (rng.uniform() - 0.5) * (3.0 / 255.0), 0.0, 1.0);
        io::write_png(root / "real" / (stem + ".png"), real);
        io::write_png(root / "fake" / (stem + ".png"), fake);
        io::write_landmarks(root / "landmarks" / (stem + ".json"), lm);
    }
    io::write_png(root / "real" / "pair_99.png", face_image(kW, kH, 99));

    const fs::path cfg = root / "config.toml";
    io::write_text(cfg, "seed = 20240617\nworkers = " + std::to_string(workers) +
                            "\n\n[input]\nreal_dir = \"real\"\nfake_dir = \"fake\"\nlandmarks_dir = \"landmarks\"\n"
                            "\n[output]\nimages_dir = \"out/images\"\nmanifest = \"out/manifest.jsonl\"\n"
                            "report = \"out/report.json\"\n\n[region]\ntheta = 0.05\n\n[blend]\ntheta_b = 0.5\n"
                            "alpha = 0.9\n");
    return cfg;
}

fs::path golden_manifest_path() { return fs::path(FORGEPROMPT_TEST_DATA) / "golden_manifest.jsonl"; }

}  // namespace fixture
