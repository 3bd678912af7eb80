#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forgeprompt/regions.hpp"
#include "forgeprompt/typing.hpp"

namespace forgeprompt::prompting {

enum class PromptKind { CoarseReal, CoarseFake, Fine };

struct Prompt {
    std::string text;
    PromptKind kind = PromptKind::CoarseReal;
    std::optional<regions::Region> region;      // Fine only
    std::optional<typing::ForgeryType> type;    // Fine only

    bool operator==(const Prompt&) const = default;
};

enum class CoarseLabel { Real, Fake };

std::string_view to_string(CoarseLabel l) noexcept;

Prompt coarse_prompt(CoarseLabel label);
Prompt fine_prompt(regions::Region region, typing::ForgeryType type);

/// Inverse of coarse_prompt / fine_prompt; nullopt for any other text.
std::optional<Prompt> parse(std::string_view text);

/// 2 coarse prompts, then 4 regions x 5 types (region-major).
const std::vector<Prompt>& vocabulary();

inline constexpr std::size_t kCoarseCount = 2;
inline constexpr std::size_t kVocabularySize = 22;

/// Row of `p` in vocabulary().
std::size_t vocabulary_index(const Prompt& p);

}  // namespace forgeprompt::prompting
