#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "forgeprompt/blending.hpp"
#include "forgeprompt/config.hpp"
#include "forgeprompt/regions.hpp"
#include "forgeprompt/typing.hpp"

namespace forgeprompt::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class SkipReason {
    Unpaired,
    UnreadableImage,
    BadLandmarks,
    DimensionMismatch,
    NoRegion,
    NoType,
    SolverDiverged,
    RegionTouchesBorder,
    RegionTooSmall,
};

inline constexpr std::array<SkipReason, 9> kAllSkipReasons{
    SkipReason::Unpaired,       SkipReason::UnreadableImage,    SkipReason::BadLandmarks,
    SkipReason::DimensionMismatch, SkipReason::NoRegion,        SkipReason::NoType,
    SkipReason::SolverDiverged, SkipReason::RegionTouchesBorder, SkipReason::RegionTooSmall};

/// kebab-case, e.g. "no-region".
std::string_view to_string(SkipReason r) noexcept;

/// Paths of one stem present in all three roots.
struct Triple {
    std::string stem;  // relative to the roots, '/'-separated, no extension
    fs::path real_path;
    fs::path fake_path;
    fs::path landmarks_path;
};

struct IngestResult {
    std::vector<Triple> triples;                                // lexicographic by stem
    std::vector<std::pair<std::string, SkipReason>> skipped;    // stems missing from some root
    std::size_t scanned = 0;                                    // union of stems
};

/// Real/fake roots contribute *.png files, the landmark root *.json files,
/// searched recursively. Throws MissingDirectory.
IngestResult ingest(const PipelineConfig& cfg);

struct LoadedTriple {
    ImageBuffer real;
    ImageBuffer fake;
    regions::LandmarkSet landmarks;
};

/// Throws UnreadableImage, MalformedLandmarks, DimensionMismatch.
LoadedTriple load_triple(const Triple& t, double landmark_slack);

/// One manifest record.
struct MixedSample {
    std::string id;
    std::string real_path;  // relative to the manifest's directory
    std::string fake_path;
    std::string mixed_path;
    regions::Region region = regions::Region::Face;
    blending::MethodKind method = blending::MethodKind::Alpha;
    double alpha = 0.0;                       // Alpha only
    std::optional<blending::PoissonStats> poisson;  // Poisson only
    typing::TypeReport verdicts;
    typing::ForgeryType forgery_type = typing::ForgeryType::BlendBoundary;
    std::string prompt;
    std::array<double, 4> region_means{};  // kAllRegions order
    std::uint64_t seed = 0;
};

Json to_json(const MixedSample& s);
/// Throws InvalidArgument on missing keys or wrong types.
MixedSample sample_from_json(const Json& j);

/// Paths recorded in the manifest.
struct SamplePaths {
    std::string id;
    fs::path mixed_file;       // where the PNG goes
    std::string real_rel;      // as written in the manifest
    std::string fake_rel;
    std::string mixed_rel;
};

SamplePaths sample_paths(const PipelineConfig& cfg, const Triple& t, int sample_index);

struct PairResult {
    std::optional<MixedSample> sample;
    std::optional<SkipReason> skip;
    std::string detail;  // error text for skips
    ImageBuffer mixed;   // empty on skip
};

/// Mask, regions, selection, method draw, type decision and blend for one
/// pair. Pure: writes nothing. Sub-module failures become skip reasons.
PairResult process_pair(const LoadedTriple& pair, const PipelineConfig& cfg, const SamplePaths& paths,
                        std::uint64_t seed);

struct RunReport {
    std::size_t scanned = 0;  // units: one per unpaired stem, samples_per_pair per paired stem
    std::size_t pairs = 0;
    std::size_t emitted = 0;
    std::map<SkipReason, std::size_t> skipped;
    double wall_time_s = 0.0;

    std::size_t total_skipped() const;
    Json to_json() const;
};

/// Runs every triple on `cfg.workers` threads, writes the mixed PNGs, the
/// manifest (ingestion order) and the report. Throws Io on unwritable
/// outputs and MissingDirectory on missing inputs.
RunReport run(const PipelineConfig& cfg);

struct LintIssue {
    std::size_t line = 0;
    std::string message;
};

/// Checks every record: key order, prompt = fine_prompt(region, type),
/// BlendBoundary iff alpha, a Poisson sample's type backed by a True
/// verdict, value ranges, unique ids. Thresholds are not stored in the
/// manifest so verdicts are not re-derived from scores.
std::vector<LintIssue> lint_manifest(const std::string& jsonl);

}  // namespace forgeprompt::pipeline
