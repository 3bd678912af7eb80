#include "forgeprompt/c2f.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <string>

#include "forgeprompt/rng.hpp"
#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::c2f {
namespace {

void check_rows(const Matrix& m) {
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        for (double v : r)
            if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "embedding row " + std::to_string(i) + " is not finite");
        if (std::sqrt(k.dot(r.data(), r.data(), r.size())) <= kMinNorm)
            throw Error(Errc::ZeroVector, "embedding row " + std::to_string(i) + " has zero norm");
    }
}

struct Normalized {
    Matrix hat;
    std::vector<double> norm;
};

Normalized normalize_rows(const EmbeddingBatch& b) {
    const auto& k = simd::kernels();
    Normalized out{b.matrix(), std::vector<double>(b.rows())};
    for (std::size_t i = 0; i < b.rows(); ++i) {
        auto r = out.hat.row(i);
        out.norm[i] = std::sqrt(k.dot(r.data(), r.data(), r.size()));
        for (double& v : r) v /= out.norm[i];
    }
    return out;
}

struct CosineForward {
    Normalized u;
    Normalized v;
    Matrix sim;
};

CosineForward cosine_forward(const EmbeddingBatch& u, const EmbeddingBatch& v) {
    if (u.dim() != v.dim())
        throw Error(Errc::DimensionMismatch,
                    "feature dims differ: " + std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
    const auto& k = simd::kernels();
    CosineForward f{normalize_rows(u), normalize_rows(v), Matrix(u.rows(), v.rows())};
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < v.rows(); ++j)
            f.sim(i, j) = std::clamp(k.dot(f.u.hat.row(i).data(), f.v.hat.row(j).data(), u.dim()), -1.0, 1.0);
    return f;
}

// Given G = dL/dS, returns dL/du and dL/dv through s_ij = <u_i,v_j>/(|u_i||v_j|).
void cosine_backward(const CosineForward& f, const Matrix& G, Matrix& gu, Matrix& gv) {
    const auto& k = simd::kernels();
    const std::size_t d = f.u.hat.cols;
    gu = Matrix(f.sim.rows, d);
    gv = Matrix(f.sim.cols, d);
    for (std::size_t i = 0; i < f.sim.rows; ++i) {
        double radial = 0.0;
        for (std::size_t j = 0; j < f.sim.cols; ++j) {
            k.axpy(G(i, j), f.v.hat.row(j).data(), gu.row(i).data(), d);
            radial += G(i, j) * f.sim(i, j);
        }
        k.axpy(-radial, f.u.hat.row(i).data(), gu.row(i).data(), d);
        for (double& x : gu.row(i)) x /= f.u.norm[i];
    }
    for (std::size_t j = 0; j < f.sim.cols; ++j) {
        double radial = 0.0;
        for (std::size_t i = 0; i < f.sim.rows; ++i) {
            k.axpy(G(i, j), f.u.hat.row(i).data(), gv.row(j).data(), d);
            radial += G(i, j) * f.sim(i, j);
        }
        k.axpy(-radial, f.v.hat.row(j).data(), gv.row(j).data(), d);
        for (double& x : gv.row(j)) x /= f.v.norm[j];
    }
}

double log_sum_exp(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

EmbeddingBatch::EmbeddingBatch(Matrix m) : m_(std::move(m)) {
    if (m_.data.size() != m_.rows * m_.cols) throw Error(Errc::InvalidArgument, "embedding buffer size mismatch");
    check_rows(m_);
}

EmbeddingBatch EmbeddingBatch::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) throw Error(Errc::DimensionMismatch, "ragged embedding rows");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return EmbeddingBatch(std::move(m));
}

void EmbeddingBatch::step(const Matrix& delta, double scale) {
    if (delta.rows != m_.rows || delta.cols != m_.cols) throw Error(Errc::DimensionMismatch, "step shape mismatch");
    simd::kernels().axpy(scale, delta.data.data(), m_.data.data(), m_.data.size());
    for (double v : m_.data)
        if (!std::isfinite(v)) throw Error(Errc::Divergence, "embedding parameters became non-finite");
    check_rows(m_);
}

void C2FConfig::validate() const {
    if (!(phi >= 0.0)) throw Error(Errc::Config, "c2f.phi must be >= 0");
    if (!(tau > 0.0)) throw Error(Errc::Config, "c2f.tau must be > 0");
    if (B < 1 || N < 2 || D < 1) throw Error(Errc::Config, "c2f batch sizes must be B >= 1, N >= 2, D >= 1");
}

Matrix cosine_sim(const EmbeddingBatch& u, const EmbeddingBatch& v) {
    return cosine_forward(u, v).sim;
}

PairGradient coarse_loss(const EmbeddingBatch& v_c, const EmbeddingBatch& l_c, std::span<const int> labels,
                         const C2FConfig& cfg) {
    if (l_c.rows() != 2) throw Error(Errc::DimensionMismatch, "coarse text features need exactly 2 rows");
    if (labels.size() != v_c.rows()) throw Error(Errc::DimensionMismatch, "one label per coarse image row");
    for (int y : labels)
        if (y != 0 && y != 1) throw Error(Errc::InvalidArgument, "coarse labels must be 0 or 1");
    if (v_c.rows() == 0) throw Error(Errc::EmptyInput, "empty coarse batch");

    const auto f = cosine_forward(v_c, l_c);
    const double b = static_cast<double>(v_c.rows());
    Matrix G(f.sim.rows, 2);
    PairGradient out;
    for (std::size_t i = 0; i < f.sim.rows; ++i) {
        const double z[2] = {f.sim(i, 0) / cfg.tau, f.sim(i, 1) / cfg.tau};
        const double lse = log_sum_exp(z);
        const auto y = static_cast<std::size_t>(labels[i]);
        out.loss += lse - z[y];
        for (std::size_t c = 0; c < 2; ++c) {
            const double p = std::exp(z[c] - lse);
            G(i, c) = (p - (c == y ? 1.0 : 0.0)) / (b * cfg.tau);
        }
    }
    out.loss /= b;
    cosine_backward(f, G, out.grad_image, out.grad_text);
    return out;
}

PairGradient fine_loss(const EmbeddingBatch& v_f, const EmbeddingBatch& l_f, const C2FConfig& cfg) {
    if (v_f.rows() != l_f.rows()) throw Error(Errc::DimensionMismatch, "fine batches need equal row counts");
    if (v_f.rows() < 2) throw Error(Errc::InvalidArgument, "fine batch needs at least 2 pairs");
    const auto f = cosine_forward(v_f, l_f);
    const std::size_t n = f.sim.rows;
    const double nd = static_cast<double>(n);

    Matrix z(n, n);
    for (std::size_t i = 0; i < n * n; ++i) z.data[i] = f.sim.data[i] / cfg.tau;

    std::vector<double> row_lse(n), col_lse(n), col(n);
    for (std::size_t i = 0; i < n; ++i) row_lse[i] = log_sum_exp(z.row(i));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = z(i, j);
        col_lse[j] = log_sum_exp(col);
    }

    PairGradient out;
    double i2t = 0.0, t2i = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        i2t += row_lse[i] - z(i, i);
        t2i += col_lse[i] - z(i, i);
    }
    out.loss = 0.5 * (i2t / nd + t2i / nd);

    Matrix G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double diag = i == j ? 1.0 : 0.0;
            const double p_row = std::exp(z(i, j) - row_lse[i]);
            const double p_col = std::exp(z(i, j) - col_lse[j]);
            G(i, j) = 0.5 * ((p_row - diag) + (p_col - diag)) / (nd * cfg.tau);
        }
    cosine_backward(f, G, out.grad_image, out.grad_text);
    return out;
}

LossReport total_loss(const EmbeddingBatch& v_c, const EmbeddingBatch& l_c, std::span<const int> labels,
                      const EmbeddingBatch& v_f, const EmbeddingBatch& l_f, const C2FConfig& cfg) {
    auto c = coarse_loss(v_c, l_c, labels, cfg);
    auto f = fine_loss(v_f, l_f, cfg);
    LossReport rep;
    rep.coarse = c.loss;
    rep.fine = f.loss;
    rep.total = c.loss + cfg.phi * f.loss;
    rep.grad_coarse_image = std::move(c.grad_image);
    rep.grad_coarse_text = std::move(c.grad_text);
    for (double& g : f.grad_image.data) g *= cfg.phi;
    for (double& g : f.grad_text.data) g *= cfg.phi;
    rep.grad_fine_image = std::move(f.grad_image);
    rep.grad_fine_text = std::move(f.grad_text);
    return rep;
}

ToyDataset ToyDataset::random(std::size_t B, std::size_t N, std::size_t D, std::uint64_t seed) {
    Rng rng(seed);
    auto batch = [&](std::size_t rows) {
        Matrix m(rows, D);
        for (std::size_t i = 0; i < rows; ++i) {
            double n2 = 0.0;
            do {
                n2 = 0.0;
                for (double& v : m.row(i)) {
                    v = rng.normal();
                    n2 += v * v;
                }
            } while (n2 <= 1e-6);
            const double n = std::sqrt(n2);
            for (double& v : m.row(i)) v /= n;
        }
        return EmbeddingBatch(std::move(m));
    };
    ToyDataset ds;
    ds.coarse_image = batch(B);
    ds.coarse_text = batch(2);
    ds.labels.resize(B);
    for (int& y : ds.labels) y = static_cast<int>(rng.index(2));
    ds.fine_image = batch(N);
    ds.fine_text = batch(N);
    return ds;
}

double fine_retrieval_accuracy(const EmbeddingBatch& image, const EmbeddingBatch& text) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < image.rows(); ++i)
        if (argmax_cosine(image.row(i), text, 0, text.rows()).index == i) ++hits;
    return image.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(image.rows());
}

double coarse_accuracy(const EmbeddingBatch& image, const EmbeddingBatch& text, std::span<const int> labels) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < image.rows(); ++i)
        if (static_cast<int>(argmax_cosine(image.row(i), text, 0, text.rows()).index) == labels[i]) ++hits;
    return image.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(image.rows());
}

TrainResult toy_cotrain(ToyDataset data, const C2FConfig& cfg, int steps, double learning_rate) {
    TrainResult res;
    auto record = [&](double loss) {
        if (!std::isfinite(loss)) throw Error(Errc::Divergence, "loss became non-finite");
        res.loss_trace.push_back(loss);
        res.fine_accuracy.push_back(fine_retrieval_accuracy(data.fine_image, data.fine_text));
        res.coarse_accuracy.push_back(coarse_accuracy(data.coarse_image, data.coarse_text, data.labels));
    };
    for (int s = 0; s < steps; ++s) {
        const auto rep = total_loss(data.coarse_image, data.coarse_text, data.labels, data.fine_image,
                                    data.fine_text, cfg);
        record(rep.total);
        data.coarse_image.step(rep.grad_coarse_image, -learning_rate);
        data.coarse_text.step(rep.grad_coarse_text, -learning_rate);
        data.fine_image.step(rep.grad_fine_image, -learning_rate);
        data.fine_text.step(rep.grad_fine_text, -learning_rate);
    }
    record(total_loss(data.coarse_image, data.coarse_text, data.labels, data.fine_image, data.fine_text, cfg).total);
    res.params = std::move(data);
    return res;
}

ArgMax argmax_cosine(std::span<const double> feature, const EmbeddingBatch& rows, std::size_t first,
                     std::size_t last) {
    if (feature.size() != rows.dim()) throw Error(Errc::DimensionMismatch, "feature dim does not match text features");
    if (first >= last || last > rows.rows()) throw Error(Errc::InvalidArgument, "empty or out-of-range row span");
    const auto& k = simd::kernels();
    const double fn = std::sqrt(k.dot(feature.data(), feature.data(), feature.size()));
    if (!(fn > kMinNorm)) throw Error(Errc::ZeroVector, "image feature has zero norm");
    ArgMax best{first, -2.0};
    for (std::size_t j = first; j < last; ++j) {
        const auto r = rows.row(j);
        const double rn = std::sqrt(k.dot(r.data(), r.data(), r.size()));
        const double s = std::clamp(k.dot(feature.data(), r.data(), r.size()) / (fn * rn), -1.0, 1.0);
        if (s > best.similarity) best = {j, s};
    }
    return best;
}

Match match(std::span<const double> image_feature, const EmbeddingBatch& text_features, MatchMode mode) {
    const auto& vocab = prompting::vocabulary();
    if (text_features.rows() != vocab.size())
        throw Error(Errc::DimensionMismatch, "text features need one row per vocabulary prompt (" +
                                                 std::to_string(vocab.size()) + ")");
    const std::size_t first = mode == MatchMode::Coarse ? 0 : prompting::kCoarseCount;
    const std::size_t last = mode == MatchMode::Coarse ? prompting::kCoarseCount : vocab.size();
    const auto best = argmax_cosine(image_feature, text_features, first, last);
    return {best.index, vocab[best.index], best.similarity};
}

GradcheckReport gradcheck(std::size_t n, std::size_t d, std::size_t trials, std::uint64_t seed, double h,
                          double tolerance) {
    if (n < 2 || d < 1) throw Error(Errc::InvalidArgument, "gradcheck needs n >= 2 and d >= 1");
    GradcheckReport rep;
    rep.trials = trials;
    C2FConfig cfg;
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        auto random_batch = [&](std::size_t rows) {
            Matrix m(rows, d);
            for (double& v : m.data) v = rng.normal();
            return EmbeddingBatch(std::move(m));
        };
        cfg.tau = 0.5 + rng.uniform();
        std::array<EmbeddingBatch, 4> params{random_batch(n), random_batch(2), random_batch(n), random_batch(n)};
        std::vector<int> labels(n);
        for (int& y : labels) y = static_cast<int>(rng.index(2));

        auto eval = [&](const std::array<EmbeddingBatch, 4>& p) {
            return total_loss(p[0], p[1], labels, p[2], p[3], cfg);
        };
        const auto analytic_rep = eval(params);
        const std::array<const Matrix*, 4> analytic{&analytic_rep.grad_coarse_image, &analytic_rep.grad_coarse_text,
                                                    &analytic_rep.grad_fine_image, &analytic_rep.grad_fine_text};
        double diff2 = 0.0, an2 = 0.0, nu2 = 0.0;
        for (std::size_t b = 0; b < params.size(); ++b) {
            for (std::size_t i = 0; i < params[b].matrix().data.size(); ++i) {
                auto perturbed = [&](double delta) {
                    auto p = params;
                    Matrix m = p[b].matrix();
                    m.data[i] += delta;
                    p[b] = EmbeddingBatch(std::move(m));
                    return eval(p).total;
                };
                const double numeric = (perturbed(h) - perturbed(-h)) / (2.0 * h);
                const double a = analytic[b]->data[i];
                diff2 += (a - numeric) * (a - numeric);
                an2 += a * a;
                nu2 += numeric * numeric;
            }
        }
        const double denom = std::max({std::sqrt(an2), std::sqrt(nu2), 1e-300});
        rep.max_rel_error = std::max(rep.max_rel_error, std::sqrt(diff2) / denom);
    }
    rep.passed = rep.max_rel_error < tolerance;
    return rep;
}

}  // namespace forgeprompt::c2f
