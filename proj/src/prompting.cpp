#include "forgeprompt/prompting.hpp"

#include <algorithm>

namespace forgeprompt::prompting {
namespace {

constexpr std::string_view kReal = "this is a real person";
constexpr std::string_view kFake = "this is a fake person";
constexpr std::string_view kRegionPart = ", the forgery region is ";
constexpr std::string_view kTypePart = ", the forgery type is ";

}  // namespace

std::string_view to_string(CoarseLabel l) noexcept {
    return l == CoarseLabel::Real ? "real" : "fake";
}

Prompt coarse_prompt(CoarseLabel label) {
    if (label == CoarseLabel::Real) return {std::string(kReal), PromptKind::CoarseReal, {}, {}};
    return {std::string(kFake), PromptKind::CoarseFake, {}, {}};
}

Prompt fine_prompt(regions::Region region, typing::ForgeryType type) {
    std::string text(kFake);
    text += kRegionPart;
    text += regions::to_string(region);
    text += kTypePart;
    text += typing::phrase(type);
    return {std::move(text), PromptKind::Fine, region, type};
}

std::optional<Prompt> parse(std::string_view text) {
    if (text == kReal) return coarse_prompt(CoarseLabel::Real);
    if (text == kFake) return coarse_prompt(CoarseLabel::Fake);
    if (!text.starts_with(kFake)) return std::nullopt;
    text.remove_prefix(kFake.size());
    if (!text.starts_with(kRegionPart)) return std::nullopt;
    text.remove_prefix(kRegionPart.size());
    const auto cut = text.find(kTypePart);
    if (cut == std::string_view::npos) return std::nullopt;
    const auto region = regions::parse_region(text.substr(0, cut));
    const auto type = typing::parse_phrase(text.substr(cut + kTypePart.size()));
    if (!region || !type) return std::nullopt;
    return fine_prompt(*region, *type);
}

const std::vector<Prompt>& vocabulary() {
    static const std::vector<Prompt> vocab = [] {
        std::vector<Prompt> v{coarse_prompt(CoarseLabel::Real), coarse_prompt(CoarseLabel::Fake)};
        for (auto r : regions::kAllRegions)
            for (auto t : typing::kAllTypes) v.push_back(fine_prompt(r, t));
        return v;
    }();
    return vocab;
}

std::size_t vocabulary_index(const Prompt& p) {
    const auto& v = vocabulary();
    const auto it = std::find_if(v.begin(), v.end(), [&](const Prompt& q) { return q.text == p.text; });
    if (it == v.end()) throw Error(Errc::InvalidArgument, "prompt not in vocabulary: " + p.text);
    return static_cast<std::size_t>(it - v.begin());
}

}  // namespace forgeprompt::prompting
