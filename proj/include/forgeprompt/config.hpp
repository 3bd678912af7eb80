#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "forgeprompt/blending.hpp"
#include "forgeprompt/c2f.hpp"
#include "forgeprompt/typing.hpp"

namespace forgeprompt {

struct PipelineConfig {
    std::filesystem::path real_dir;
    std::filesystem::path fake_dir;
    std::filesystem::path landmarks_dir;
    std::filesystem::path images_dir;
    std::filesystem::path manifest;
    std::filesystem::path report;  // defaults to <manifest stem>.report.json

    std::uint64_t seed = 0;
    int workers = 1;
    int samples_per_pair = 1;

    double theta = 0.05;
    double landmark_slack = 2.0;  // pixels outside the frame still accepted
    typing::TypeThresholds types;
    blending::BlendConfig blend;
    c2f::C2FConfig c2f;

    /// Throws Config.
    void validate() const;
};

/// Relative paths resolve against `base_dir`. Unknown keys are rejected so
/// a misspelt threshold cannot silently fall back to its default.
PipelineConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

}  // namespace forgeprompt
