#include <gtest/gtest.h>

#include <set>

#include "forgeprompt/prompting.hpp"

using namespace forgeprompt;
using namespace forgeprompt::prompting;

TEST(Prompt, CoarseTemplates) {
    EXPECT_EQ(coarse_prompt(CoarseLabel::Real).text, "this is a real person");
    EXPECT_EQ(coarse_prompt(CoarseLabel::Fake).text, "this is a fake person");
}

TEST(Prompt, FineTemplate) {
    EXPECT_EQ(fine_prompt(regions::Region::Mouth, typing::ForgeryType::BlendBoundary).text,
              "this is a fake person, the forgery region is mouth, the forgery type is blend boundary");
    EXPECT_EQ(fine_prompt(regions::Region::Eyes, typing::ForgeryType::ColorDifference).text,
              "this is a fake person, the forgery region is eyes, the forgery type is color difference");
}

TEST(Prompt, VocabularyOrderAndRoundTrip) {
    const auto& v = vocabulary();
    ASSERT_EQ(v.size(), kVocabularySize);
    EXPECT_EQ(v[0].kind, PromptKind::CoarseReal);
    EXPECT_EQ(v[1].kind, PromptKind::CoarseFake);
    EXPECT_EQ(v[2].text, "this is a fake person, the forgery region is mouth, the forgery type is color difference");
    EXPECT_EQ(v[21].text, "this is a fake person, the forgery region is face, the forgery type is blend boundary");
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < v.size(); ++i) {
        distinct.insert(v[i].text);
        const auto back = parse(v[i].text);
        ASSERT_TRUE(back);
        EXPECT_EQ(*back, v[i]);
        EXPECT_EQ(vocabulary_index(v[i]), i);
    }
    EXPECT_EQ(distinct.size(), v.size());
}

TEST(Prompt, ParseRejectsOtherText) {
    for (const char* s : {"", "this is a fake", "this is a fake person, the forgery region is ears, the forgery type is blur",
                          "this is a fake person, the forgery region is mouth, the forgery type is noise",
                          "this is a fake person, the forgery region is mouth"})
        EXPECT_FALSE(parse(s)) << s;
    EXPECT_THROW(vocabulary_index(Prompt{"hello", PromptKind::Fine, {}, {}}), Error);
}
