#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forgeprompt {

enum class Errc {
    DimensionMismatch,
    ImageTooSmall,
    EmptyInput,
    NotNormalized,
    DegenerateHull,
    EmptyRegion,
    RegionTouchesBorder,
    SolverDiverged,
    ZeroVector,
    Divergence,
    InvalidArgument,
    MissingDirectory,
    UnreadableImage,
    MalformedLandmarks,
    MissingImage,
    Io,
    Config,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace forgeprompt
