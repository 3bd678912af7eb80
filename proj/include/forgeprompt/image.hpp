#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forgeprompt/error.hpp"

namespace forgeprompt {

/// H x W x 3 image, RGB interleaved, channel values in [0,1].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    static constexpr int channels = 3;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, double fill = 0.0);
    static ImageBuffer filled(int w, int h, double r, double g, double b);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t index(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * channels; }

    double& at(int x, int y, int c) { return data[index(x, y) + c]; }
    double at(int x, int y, int c) const { return data[index(x, y) + c]; }

    /// Copies the rectangle [x0, x0+w) x [y0, y0+h).
    ImageBuffer crop(int x0, int y0, int w, int h) const;

    /// Throws InvalidArgument unless dimensions are positive, the buffer
    /// length matches and every value lies in [0,1].
    void validate() const;

    bool operator==(const ImageBuffer&) const = default;
};

/// Single-channel real-valued map. The tag keeps grayscale images, forgery
/// masks and filter responses from being mixed up.
template <class Tag>
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::span<const double> values() const { return data; }

    Plane crop(int x0, int y0, int w, int h) const {
        Plane out(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(x, y) = at(x0 + x, y0 + y);
        return out;
    }

    bool operator==(const Plane&) const = default;
};

struct GrayTag {};
struct MaskTag {};
struct ResponseTag {};

using GrayImage = Plane<GrayTag>;
/// Per-pixel forgery evidence in [0,1].
using ForgeryMask = Plane<MaskTag>;
/// Unbounded filter output (e.g. Laplacian).
using ResponseMap = Plane<ResponseTag>;

/// CIE L*a*b*, interleaved L,a,b.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    double L(int x, int y) const { return data[(static_cast<std::size_t>(y) * width + x) * 3]; }
    double a(int x, int y) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + 1]; }
    double b(int x, int y) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + 2]; }
};

}  // namespace forgeprompt
