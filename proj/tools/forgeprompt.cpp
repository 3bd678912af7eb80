// forgeprompt: mixed forgery image generation and C2F loss utilities.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "forgeprompt/c2f.hpp"
#include "forgeprompt/config.hpp"
#include "forgeprompt/io.hpp"
#include "forgeprompt/pipeline.hpp"
#include "forgeprompt/preview.hpp"
#include "forgeprompt/prompting.hpp"

namespace fp = forgeprompt;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kCheckFailed = 2;

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> workers,
                 std::optional<int> samples) {
    auto cfg = fp::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (samples) cfg.samples_per_pair = *samples;
    cfg.validate();
    const auto report = fp::pipeline::run(cfg);
    std::cerr << "scanned " << report.scanned << ", emitted " << report.emitted << ", skipped "
              << report.total_skipped() << " in " << report.wall_time_s << " s\n";
    std::cout << report.to_json().dump(2) << "\n";
    return kOk;
}

int cmd_lint(const std::string& manifest) {
    const auto issues = fp::pipeline::lint_manifest(fp::io::read_text(manifest));
    for (const auto& i : issues) std::cout << manifest << ":" << i.line << ": " << i.message << "\n";
    if (!issues.empty()) {
        std::cerr << issues.size() << " issue(s)\n";
        return kCheckFailed;
    }
    std::cerr << "ok\n";
    return kOk;
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_losses(const std::string& coarse_path, const std::string& labels_path, const std::string& fine_image,
               const std::string& fine_text, double phi, double tau) {
    // Coarse file mixes the two prompt features (prompt_index 0 = real,
    // 1 = fake) with image features keyed by id.
    std::map<std::int64_t, std::vector<double>> prompts;
    std::vector<fp::io::EmbeddingRecord> images;
    for (auto& r : fp::io::read_embeddings(coarse_path)) {
        if (r.id)
            images.push_back(std::move(r));
        else if (*r.prompt_index == 0 || *r.prompt_index == 1)
            prompts[*r.prompt_index] = std::move(r.vector);
        else
            throw fp::Error(fp::Errc::InvalidArgument, "coarse prompt_index must be 0 or 1");
    }
    if (prompts.size() != 2) throw fp::Error(fp::Errc::InvalidArgument, "coarse file needs prompt_index 0 and 1");

    std::map<std::string, int> label_of;
    {
        std::ifstream in(labels_path);
        if (!in) throw fp::Error(fp::Errc::Io, "cannot read " + labels_path);
        std::string line;
        for (int n = 1; std::getline(in, line); ++n) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("id") || !j.contains("label"))
                throw fp::Error(fp::Errc::InvalidArgument, labels_path + ":" + std::to_string(n) +
                                                              ": expected {\"id\": ..., \"label\": 0|1|\"real\"|\"fake\"}");
            const auto& l = j["label"];
            int y = -1;
            if (l.is_number_integer()) y = l.get<int>();
            if (l.is_string()) y = l == "real" ? 0 : (l == "fake" ? 1 : -1);
            if (y != 0 && y != 1)
                throw fp::Error(fp::Errc::InvalidArgument, labels_path + ":" + std::to_string(n) + ": bad label");
            label_of[j["id"].get<std::string>()] = y;
        }
    }
    std::vector<int> labels;
    for (const auto& r : images) {
        const auto it = label_of.find(*r.id);
        if (it == label_of.end()) throw fp::Error(fp::Errc::InvalidArgument, "no label for id '" + *r.id + "'");
        labels.push_back(it->second);
    }

    fp::c2f::C2FConfig cfg;
    cfg.phi = phi;
    cfg.tau = tau;
    cfg.validate();
    const auto v_c = fp::io::to_batch(images);
    const auto l_c = fp::c2f::EmbeddingBatch::from_rows({prompts[0], prompts[1]});
    const auto v_f = fp::io::to_batch(fp::io::read_embeddings(fine_image));
    const auto l_f = fp::io::to_batch(fp::io::read_embeddings(fine_text));
    const auto rep = fp::c2f::total_loss(v_c, l_c, labels, v_f, l_f, cfg);

    ordered_json out;
    out["coarse"] = rep.coarse;
    out["fine"] = rep.fine;
    out["total"] = rep.total;
    out["phi"] = phi;
    out["tau"] = tau;
    std::cout << out.dump() << "\n";
    return kOk;
}

int cmd_match(const std::string& image_path, const std::string& text_path, const std::string& mode_name,
              const std::string& out_path) {
    const auto mode = mode_name == "coarse" ? fp::c2f::MatchMode::Coarse : fp::c2f::MatchMode::Fine;
    auto text_rows = fp::io::read_embeddings(text_path);
    const auto& vocab = fp::prompting::vocabulary();
    std::vector<std::vector<double>> ordered(vocab.size());
    std::vector<bool> seen(vocab.size(), false);
    for (auto& r : text_rows) {
        if (!r.prompt_index || *r.prompt_index < 0 || *r.prompt_index >= static_cast<std::int64_t>(vocab.size()))
            throw fp::Error(fp::Errc::InvalidArgument, "text features need prompt_index in [0, 22)");
        const auto k = static_cast<std::size_t>(*r.prompt_index);
        if (seen[k]) throw fp::Error(fp::Errc::InvalidArgument, "duplicate prompt_index " + std::to_string(k));
        seen[k] = true;
        ordered[k] = std::move(r.vector);
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k]) throw fp::Error(fp::Errc::InvalidArgument, "missing prompt_index " + std::to_string(k));
    const auto text = fp::c2f::EmbeddingBatch::from_rows(ordered);

    std::string lines;
    const auto images = fp::io::read_embeddings(image_path);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto m = fp::c2f::match(images[i].vector, text, mode);
        ordered_json j;
        j["id"] = images[i].id.value_or(std::to_string(i));
        j["prompt_index"] = m.vocab_index;
        j["prompt"] = m.prompt.text;
        j["similarity"] = m.similarity;
        lines += j.dump() + "\n";
    }
    if (out_path.empty())
        std::cout << lines;
    else
        fp::io::write_text(out_path, lines);
    return kOk;
}

int cmd_gradcheck(std::size_t n, std::size_t d, std::size_t trials, std::uint64_t seed) {
    const auto rep = fp::c2f::gradcheck(n, d, trials, seed);
    ordered_json j;
    j["trials"] = rep.trials;
    j["max_rel_error"] = rep.max_rel_error;
    j["passed"] = rep.passed;
    std::cout << j.dump() << "\n";
    return rep.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed forgery image generation with prompt annotations"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Synthesize mixed samples and write the manifest");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers, samples;
    gen->add_option("--config", config_path, "TOML config")->required();
    gen->add_option("--seed", seed, "Override the global seed");
    gen->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    gen->add_option("--samples-per-pair", samples, "Samples drawn per image pair")->check(CLI::PositiveNumber);

    auto* prev = app.add_subcommand("preview", "Render real | fake | mask | mixed montages");
    std::string manifest, ids, out_png;
    prev->add_option("--manifest", manifest)->required();
    prev->add_option("--ids", ids, "Comma separated sample ids")->required();
    prev->add_option("--out", out_png)->required();

    auto* lint = app.add_subcommand("lint", "Validate manifest records");
    std::string lint_manifest;
    lint->add_option("--manifest", lint_manifest)->required();

    auto* losses = app.add_subcommand("losses", "Evaluate the coarse, fine and total losses");
    std::string coarse, labels, fine_image, fine_text;
    double phi = 0.1, tau = 1.0;
    losses->add_option("--coarse", coarse)->required();
    losses->add_option("--labels", labels)->required();
    losses->add_option("--fine-image", fine_image)->required();
    losses->add_option("--fine-text", fine_text)->required();
    losses->add_option("--phi", phi)->capture_default_str();
    losses->add_option("--tau", tau)->capture_default_str();

    auto* matcher = app.add_subcommand("match", "Assign prompts by cosine similarity");
    std::string image_features, text_features, mode = "fine", match_out;
    matcher->add_option("--image-features", image_features)->required();
    matcher->add_option("--text-features", text_features)->required();
    matcher->add_option("--mode", mode)->check(CLI::IsMember({"coarse", "fine"}))->capture_default_str();
    matcher->add_option("--out", match_out, "Write JSONL here instead of stdout");

    auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the loss gradients");
    std::size_t n = 6, d = 16, trials = 100;
    std::uint64_t gc_seed = 1;
    gc->add_option("--n", n)->capture_default_str();
    gc->add_option("--d", d)->capture_default_str();
    gc->add_option("--trials", trials)->capture_default_str();
    gc->add_option("--seed", gc_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kFatal;
    }

    try {
        if (*gen) return cmd_generate(config_path, seed, workers, samples);
        if (*prev) {
            fp::preview::write_preview(manifest, split_ids(ids), out_png);
            return kOk;
        }
        if (*lint) return cmd_lint(lint_manifest);
        if (*losses) return cmd_losses(coarse, labels, fine_image, fine_text, phi, tau);
        if (*matcher) return cmd_match(image_features, text_features, mode, match_out);
        if (*gc) return cmd_gradcheck(n, d, trials, gc_seed);
    } catch (const fp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    }
    return kFatal;
}
