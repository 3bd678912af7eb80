#include "forgeprompt/image.hpp"

#include <cmath>
#include <string>

namespace forgeprompt {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ImageTooSmall: return "ImageTooSmall";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::NotNormalized: return "NotNormalized";
        case Errc::DegenerateHull: return "DegenerateHull";
        case Errc::EmptyRegion: return "EmptyRegion";
        case Errc::RegionTouchesBorder: return "RegionTouchesBorder";
        case Errc::SolverDiverged: return "SolverDiverged";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::Divergence: return "Divergence";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::MissingDirectory: return "MissingDirectory";
        case Errc::UnreadableImage: return "UnreadableImage";
        case Errc::MalformedLandmarks: return "MalformedLandmarks";
        case Errc::MissingImage: return "MissingImage";
        case Errc::Io: return "Io";
        case Errc::Config: return "Config";
    }
    return "Unknown";
}

ImageBuffer::ImageBuffer(int w, int h, double fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h * channels, fill) {}

ImageBuffer ImageBuffer::filled(int w, int h, double r, double g, double b) {
    ImageBuffer img(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[3 * i] = r;
        img.data[3 * i + 1] = g;
        img.data[3 * i + 2] = b;
    }
    return img;
}

ImageBuffer ImageBuffer::crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width || y0 + h > height)
        throw Error(Errc::InvalidArgument, "crop rectangle outside image");
    ImageBuffer out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) out.at(x, y, c) = at(x0 + x, y0 + y, c);
    return out;
}

void ImageBuffer::validate() const {
    if (width < 1 || height < 1)
        throw Error(Errc::InvalidArgument, "image dimensions must be positive");
    if (data.size() != pixel_count() * channels)
        throw Error(Errc::InvalidArgument, "buffer length does not match dimensions");
    for (double v : data)
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(Errc::InvalidArgument, "channel value outside [0,1]: " + std::to_string(v));
}

}  // namespace forgeprompt
