#include <gtest/gtest.h>

#include <cmath>

#include "forgeprompt/c2f.hpp"

using namespace forgeprompt;
using namespace forgeprompt::c2f;

namespace {

template <class F>
EmbeddingBatch formula_batch(std::size_t rows, std::size_t d, F f) {
    Matrix m(rows, d);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < d; ++k) m(i, k) = f(double(i), double(k));
    return EmbeddingBatch(std::move(m));
}

struct Fixed {
    EmbeddingBatch vc, lc, vf, lf;
    std::vector<int> labels;
};

// Same inputs as the torch reference run (B=5, N=4, D=6).
Fixed fixed_instance() {
    Fixed f;
    f.vc = formula_batch(5, 6, [](double i, double k) { return std::sin(0.7 * i + 1.3 * k + 0.1); });
    f.lc = formula_batch(2, 6, [](double i, double k) { return std::cos(0.5 * i + 0.9 * k) + 0.1; });
    f.vf = formula_batch(4, 6, [](double i, double k) { return std::sin(1.1 * i + 0.3 * k * k + 0.2); });
    f.lf = formula_batch(4, 6, [](double i, double k) { return std::cos(0.8 * i * k + 0.4 * i + 0.5); });
    f.labels = {0, 1, 0, 1, 0};
    return f;
}

}  // namespace

TEST(Cosine, ScaleInvariantAndBounded) {
    const auto u = formula_batch(3, 4, [](double i, double k) { return 1.0 + i * k - k; });
    Matrix m3 = u.matrix();
    for (double& v : m3.data) v *= 3.0;
    const auto s = cosine_sim(u, EmbeddingBatch(m3));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s(i, i), 1.0, 1e-15);
    for (double v : s.data) {
        EXPECT_LE(v, 1.0);
        EXPECT_GE(v, -1.0);
    }
}

TEST(Cosine, Errors) {
    EXPECT_THROW(EmbeddingBatch::from_rows({{0.0, 0.0}}), Error);
    EXPECT_THROW(EmbeddingBatch::from_rows({{1.0, NAN}}), Error);
    EXPECT_THROW(cosine_sim(EmbeddingBatch::from_rows({{1.0, 0.0}}), EmbeddingBatch::from_rows({{1.0, 0.0, 0.0}})),
                 Error);
}

// torch.nn.functional.cross_entropy on the same logits
TEST(Losses, MatchReferenceValues) {
    const auto f = fixed_instance();
    C2FConfig cfg;
    auto rep = total_loss(f.vc, f.lc, f.labels, f.vf, f.lf, cfg);
    EXPECT_NEAR(rep.coarse, 0.6964679360704782, 1e-12);
    EXPECT_NEAR(rep.fine, 1.3959414385413527, 1e-12);
    EXPECT_NEAR(rep.total, 0.8360620799246135, 1e-12);
    cfg.tau = 0.07;
    rep = total_loss(f.vc, f.lc, f.labels, f.vf, f.lf, cfg);
    EXPECT_NEAR(rep.coarse, 1.8813338745607264, 1e-11);
    EXPECT_NEAR(rep.fine, 5.43221343571172, 1e-11);
    EXPECT_NEAR(rep.total, 2.4245552181318986, 1e-11);
}

TEST(Losses, UniformLogits) {
    // every image orthogonal to both coarse prompts
    const auto vc = EmbeddingBatch::from_rows({{0, 0, 1}, {0, 0, 2}});
    const auto lc = EmbeddingBatch::from_rows({{1, 0, 0}, {0, 1, 0}});
    const std::vector<int> y{0, 1};
    EXPECT_NEAR(coarse_loss(vc, lc, y, {}).loss, std::log(2.0), 1e-12);
    // all fine similarities equal
    for (std::size_t n : {2u, 5u, 8u}) {
        std::vector<std::vector<double>> rows(n, std::vector<double>{1.0, 1.0});
        const auto b = EmbeddingBatch::from_rows(rows);
        EXPECT_NEAR(fine_loss(b, b, {}).loss, std::log(double(n)), 1e-12);
    }
}

TEST(Losses, TotalIsCoarsePlusPhiFine) {
    const auto f = fixed_instance();
    for (double phi : {0.0, 0.1, 0.5}) {
        C2FConfig cfg;
        cfg.phi = phi;
        const auto rep = total_loss(f.vc, f.lc, f.labels, f.vf, f.lf, cfg);
        EXPECT_NEAR(rep.total, rep.coarse + phi * rep.fine, 1e-12);
    }
}

TEST(Losses, ShapeErrors) {
    const auto f = fixed_instance();
    const std::vector<int> short_labels{0, 1};
    EXPECT_THROW(coarse_loss(f.vc, f.lc, short_labels, {}), Error);
    const std::vector<int> bad{0, 1, 2, 0, 1};
    EXPECT_THROW(coarse_loss(f.vc, f.lc, bad, {}), Error);
    EXPECT_THROW(coarse_loss(f.vc, f.vf, f.labels, {}), Error);
    EXPECT_THROW(fine_loss(f.vf, f.vc, {}), Error);
}

TEST(Gradients, FiniteDifferences) {
    const auto rep = gradcheck(6, 16, 25, 11);
    EXPECT_TRUE(rep.passed) << rep.max_rel_error;
    EXPECT_LT(rep.max_rel_error, 1e-5);
}

TEST(Gradients, SmallestShapes) {
    EXPECT_TRUE(gradcheck(2, 1, 5, 3).passed);
    EXPECT_TRUE(gradcheck(8, 32, 3, 4).passed);
}

TEST(Toy, TrainsToFullAccuracy) {
    C2FConfig cfg;
    const auto data = ToyDataset::random(32, 24, 32, 2024);
    const auto res = toy_cotrain(data, cfg, 500, 1.0);
    ASSERT_EQ(res.loss_trace.size(), 501u);
    for (double l : res.loss_trace) EXPECT_TRUE(std::isfinite(l));
    EXPECT_LT(res.loss_trace.back(), res.loss_trace.front());
    EXPECT_EQ(res.fine_accuracy.back(), 1.0);
    EXPECT_EQ(res.coarse_accuracy.back(), 1.0);
}

TEST(Toy, SmallStepsDecreaseMonotonically) {
    const auto res = toy_cotrain(ToyDataset::random(32, 24, 32, 7), {}, 10, 0.1);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i) EXPECT_LT(res.loss_trace[i], res.loss_trace[i - 1]);
}

TEST(Toy, ZeroStepsKeepParameters) {
    const auto data = ToyDataset::random(4, 3, 5, 1);
    const auto res = toy_cotrain(data, {}, 0, 1.0);
    EXPECT_EQ(res.loss_trace.size(), 1u);
    EXPECT_EQ(res.params.fine_image.matrix().data, data.fine_image.matrix().data);
}

TEST(Toy, HugeStepDiverges) {
    auto data = ToyDataset::random(4, 3, 5, 1);
    Matrix delta(4, 5, std::numeric_limits<double>::infinity());
    EXPECT_THROW(data.coarse_image.step(delta, 1.0), Error);
}

TEST(Match, PicksClosestPrompt) {
    const auto& vocab = prompting::vocabulary();
    Matrix text(vocab.size(), vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) text(i, i) = 1.0;
    const EmbeddingBatch tf(text);
    std::vector<double> feat(vocab.size(), 0.0);
    feat[7] = 1.0;
    feat[1] = 0.5;
    const auto fine = match(feat, tf, MatchMode::Fine);
    EXPECT_EQ(fine.vocab_index, 7u);
    EXPECT_EQ(fine.prompt, vocab[7]);
    const auto coarse = match(feat, tf, MatchMode::Coarse);
    EXPECT_EQ(coarse.vocab_index, 1u);
}

TEST(Match, TiesGoToLowestIndex) {
    const auto& vocab = prompting::vocabulary();
    std::vector<std::vector<double>> rows(vocab.size(), std::vector<double>{1.0, 0.0});
    const auto tf = EmbeddingBatch::from_rows(rows);
    const std::vector<double> feat{1.0, 0.0};
    EXPECT_EQ(match(feat, tf, MatchMode::Coarse).vocab_index, 0u);
    EXPECT_EQ(match(feat, tf, MatchMode::Fine).vocab_index, prompting::kCoarseCount);
}

TEST(Match, Errors) {
    const auto tf = EmbeddingBatch::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    const std::vector<double> feat{1.0, 0.0};
    EXPECT_THROW(match(feat, tf, MatchMode::Fine), Error);  // needs 22 rows
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(argmax_cosine(zero, tf, 0, 2), Error);
}
