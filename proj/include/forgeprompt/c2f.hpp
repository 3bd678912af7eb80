#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "forgeprompt/prompting.hpp"

namespace forgeprompt::c2f {

/// Dense row-major matrix; similarities and gradients.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// N x D feature rows. Every row must be finite with norm > 1e-12.
class EmbeddingBatch {
public:
    EmbeddingBatch() = default;
    /// Throws ZeroVector / InvalidArgument if the invariants do not hold.
    explicit EmbeddingBatch(Matrix m);
    static EmbeddingBatch from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return m_.rows; }
    std::size_t dim() const { return m_.cols; }
    std::span<const double> row(std::size_t i) const { return m_.row(i); }
    const Matrix& matrix() const { return m_; }

    /// Adds `scale * delta` and re-checks the invariants (Divergence on
    /// non-finite values).
    void step(const Matrix& delta, double scale);

private:
    Matrix m_;
};

inline constexpr double kMinNorm = 1e-12;

struct C2FConfig {
    double phi = 0.1;
    double tau = 1.0;
    std::size_t B = 32;  // coarse batch
    std::size_t N = 24;  // fine batch
    std::size_t D = 768;

    void validate() const;
};

/// s(i,j) = <u_i, v_j> / (|u_i| |v_j|)
Matrix cosine_sim(const EmbeddingBatch& u, const EmbeddingBatch& v);

struct PairGradient {
    double loss = 0.0;
    Matrix grad_image;  // d loss / d image rows
    Matrix grad_text;   // d loss / d text rows
};

/// Two-class softmax cross-entropy over s(v_c, l_c) / tau. Row 0 of l_c is
/// the real prompt, row 1 the fake prompt; labels are 0 (real) / 1 (fake).
PairGradient coarse_loss(const EmbeddingBatch& v_c, const EmbeddingBatch& l_c, std::span<const int> labels,
                         const C2FConfig& cfg);

/// Symmetric cross-entropy on the diagonal of s(v_f, l_f) / tau, averaged
/// over the image->text and text->image directions.
PairGradient fine_loss(const EmbeddingBatch& v_f, const EmbeddingBatch& l_f, const C2FConfig& cfg);

struct LossReport {
    double coarse = 0.0;
    double fine = 0.0;
    double total = 0.0;
    Matrix grad_coarse_image;
    Matrix grad_coarse_text;
    Matrix grad_fine_image;  // already scaled by phi
    Matrix grad_fine_text;   // already scaled by phi
};

LossReport total_loss(const EmbeddingBatch& v_c, const EmbeddingBatch& l_c, std::span<const int> labels,
                      const EmbeddingBatch& v_f, const EmbeddingBatch& l_f, const C2FConfig& cfg);

// ---------------------------------------------------------------------------
// Toy co-training on free embeddings
// ---------------------------------------------------------------------------

struct ToyDataset {
    EmbeddingBatch coarse_image;
    EmbeddingBatch coarse_text;  // 2 rows
    std::vector<int> labels;
    EmbeddingBatch fine_image;
    EmbeddingBatch fine_text;

    /// Gaussian rows scaled to unit norm; labels uniform in {0,1}.
    static ToyDataset random(std::size_t B, std::size_t N, std::size_t D, std::uint64_t seed);
};

struct TrainResult {
    ToyDataset params;
    std::vector<double> loss_trace;  // loss before each step, plus final
    std::vector<double> fine_accuracy;
    std::vector<double> coarse_accuracy;
};

/// Plain gradient descent on L = L_c + phi L_f over all four batches.
/// Throws Divergence if the loss stops being finite.
TrainResult toy_cotrain(ToyDataset data, const C2FConfig& cfg, int steps, double learning_rate);

/// Fraction of image rows whose most similar text row is the paired one.
double fine_retrieval_accuracy(const EmbeddingBatch& image, const EmbeddingBatch& text);
/// Fraction of coarse image rows whose best coarse prompt matches the label.
double coarse_accuracy(const EmbeddingBatch& image, const EmbeddingBatch& text, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Prompt matching
// ---------------------------------------------------------------------------

/// Row in [first, last) with the highest cosine similarity; ties go to the
/// lowest index.
struct ArgMax {
    std::size_t index = 0;
    double similarity = 0.0;
};
ArgMax argmax_cosine(std::span<const double> feature, const EmbeddingBatch& rows, std::size_t first,
                     std::size_t last);

enum class MatchMode { Coarse, Fine };

struct Match {
    std::size_t vocab_index = 0;
    prompting::Prompt prompt;
    double similarity = 0.0;
};

/// `text_features` must have one row per vocabulary() entry, in order.
Match match(std::span<const double> image_feature, const EmbeddingBatch& text_features, MatchMode mode);

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

struct GradcheckReport {
    std::size_t trials = 0;
    double max_rel_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
    bool passed = false;
};

/// Central differences (step h) against the analytic gradients of L_c, L_f
/// and L on random instances with B = N = n rows of dimension d.
GradcheckReport gradcheck(std::size_t n, std::size_t d, std::size_t trials, std::uint64_t seed, double h = 1e-6,
                          double tolerance = 1e-5);

}  // namespace forgeprompt::c2f
