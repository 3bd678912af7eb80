#pragma once

#include <filesystem>
#include <string>

#include "forgeprompt/config.hpp"
#include "forgeprompt/image.hpp"
#include "forgeprompt/regions.hpp"

namespace fixture {

namespace fs = std::filesystem;

/// dlib-ordered 68-point face laid out in a w x h frame.
forgeprompt::regions::LandmarkSet face_landmarks(int w, int h);

/// Smooth shaded "face" with seeded fine texture.
forgeprompt::ImageBuffer face_image(int w, int h, std::uint64_t seed);

/// Writes real/, fake/, landmarks/ and config.toml below root: 10 matched
/// pairs plus one real image without a partner. Returns the config path.
fs::path write_pipeline_fixture(const fs::path& root, int workers = 1);

/// Golden manifest checked into the source tree.
fs::path golden_manifest_path();

}  // namespace fixture
