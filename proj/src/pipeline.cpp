#include "forgeprompt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "forgeprompt/io.hpp"
#include "forgeprompt/prompting.hpp"
#include "forgeprompt/rng.hpp"

namespace forgeprompt::pipeline {

std::string_view to_string(SkipReason r) noexcept {
    switch (r) {
        case SkipReason::Unpaired: return "unpaired";
        case SkipReason::UnreadableImage: return "unreadable-image";
        case SkipReason::BadLandmarks: return "bad-landmarks";
        case SkipReason::DimensionMismatch: return "dimension-mismatch";
        case SkipReason::NoRegion: return "no-region";
        case SkipReason::NoType: return "no-type";
        case SkipReason::SolverDiverged: return "solver-diverged";
        case SkipReason::RegionTouchesBorder: return "region-touches-border";
        case SkipReason::RegionTooSmall: return "region-too-small";
    }
    return "unknown";
}

namespace {

// stem -> file, for files with the given extension below root
std::map<std::string, fs::path> scan(const fs::path& root, std::string_view ext, const char* what) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw Error(Errc::MissingDirectory, std::string(what) + " directory not found: " + root.string());
    std::map<std::string, fs::path> out;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        const fs::path& p = it->path();
        if (p.extension() != ext) continue;
        fs::path rel = p.lexically_relative(root);
        rel.replace_extension();
        out.emplace(rel.generic_string(), p);
    }
    if (ec) throw Error(Errc::Io, "cannot scan " + root.string() + ": " + ec.message());
    return out;
}

std::string relative_to(const fs::path& p, const fs::path& dir) {
    const auto a = fs::absolute(p).lexically_normal();
    const auto b = fs::absolute(dir).lexically_normal();
    return a.lexically_relative(b).generic_string();
}

std::optional<SkipReason> skip_for(Errc code) {
    switch (code) {
        case Errc::UnreadableImage: return SkipReason::UnreadableImage;
        case Errc::MalformedLandmarks:
        case Errc::DegenerateHull: return SkipReason::BadLandmarks;
        case Errc::DimensionMismatch: return SkipReason::DimensionMismatch;
        case Errc::SolverDiverged: return SkipReason::SolverDiverged;
        case Errc::RegionTouchesBorder: return SkipReason::RegionTouchesBorder;
        case Errc::ImageTooSmall:
        case Errc::EmptyRegion: return SkipReason::RegionTooSmall;
        default: return std::nullopt;
    }
}

std::size_t region_slot(regions::Region r) {
    return static_cast<std::size_t>(std::find(regions::kAllRegions.begin(), regions::kAllRegions.end(), r) -
                                    regions::kAllRegions.begin());
}

}  // namespace

IngestResult ingest(const PipelineConfig& cfg) {
    const auto real = scan(cfg.real_dir, ".png", "real");
    const auto fake = scan(cfg.fake_dir, ".png", "fake");
    const auto marks = scan(cfg.landmarks_dir, ".json", "landmarks");

    std::set<std::string> stems;
    for (const auto* m : {&real, &fake, &marks})
        for (const auto& [stem, _] : *m) stems.insert(stem);

    IngestResult res;
    res.scanned = stems.size();
    for (const auto& stem : stems) {
        const auto r = real.find(stem), f = fake.find(stem), l = marks.find(stem);
        if (r == real.end() || f == fake.end() || l == marks.end()) {
            res.skipped.emplace_back(stem, SkipReason::Unpaired);
            continue;
        }
        res.triples.push_back({stem, r->second, f->second, l->second});
    }
    return res;
}

LoadedTriple load_triple(const Triple& t, double landmark_slack) {
    LoadedTriple out{io::read_png(t.real_path), io::read_png(t.fake_path), io::read_landmarks(t.landmarks_path)};
    if (out.real.width != out.fake.width || out.real.height != out.fake.height)
        throw Error(Errc::DimensionMismatch, t.stem + ": real and fake sizes differ");
    out.landmarks.validate(out.real.width, out.real.height, landmark_slack);
    return out;
}

SamplePaths sample_paths(const PipelineConfig& cfg, const Triple& t, int sample_index) {
    SamplePaths p;
    p.id = cfg.samples_per_pair == 1 ? t.stem : t.stem + "_s" + std::to_string(sample_index);
    p.mixed_file = cfg.images_dir / (p.id + ".png");
    const fs::path mdir = cfg.manifest.parent_path();
    p.real_rel = relative_to(t.real_path, mdir);
    p.fake_rel = relative_to(t.fake_path, mdir);
    p.mixed_rel = relative_to(p.mixed_file, mdir);
    return p;
}

PairResult process_pair(const LoadedTriple& pair, const PipelineConfig& cfg, const SamplePaths& paths,
                        std::uint64_t seed) {
    PairResult res;
    auto skip = [&](SkipReason r, std::string detail) {
        res.skip = r;
        res.detail = std::move(detail);
        return res;
    };
    try {
        Rng rng(seed);
        const auto& real = pair.real;
        const auto& fake = pair.fake;
        const auto mask = regions::generate_mask(real, fake);
        const auto regs = regions::derive_regions(pair.landmarks, real.width, real.height);
        const auto means = regions::region_means(mask, regs);
        const auto candidates = regions::extract_forgery_regions(mask, regs, cfg.theta);
        const auto region = regions::select_region(candidates, rng);
        if (!region) return skip(SkipReason::NoRegion, "no region mean above theta");
        const auto& spec = regs[region_slot(*region)];

        const auto method = blending::draw_method(cfg.blend, rng);
        const auto& bb = spec.bbox;
        const auto decision =
            typing::decide_types(real.crop(bb.x0, bb.y0, bb.width(), bb.height()),
                                 fake.crop(bb.x0, bb.y0, bb.width(), bb.height()), method.kind, cfg.types, rng);
        if (!decision.selected) return skip(SkipReason::NoType, "no measured type passed its threshold");

        auto synth = blending::blend_with(real, fake, spec, method);

        MixedSample s;
        s.id = paths.id;
        s.real_path = paths.real_rel;
        s.fake_path = paths.fake_rel;
        s.mixed_path = paths.mixed_rel;
        s.region = *region;
        s.method = method.kind;
        if (method.kind == blending::MethodKind::Alpha)
            s.alpha = method.alpha;
        else
            s.poisson = synth.poisson;
        s.verdicts = decision.report;
        s.forgery_type = *decision.selected;
        s.prompt = prompting::fine_prompt(*region, *decision.selected).text;
        s.region_means = means;
        s.seed = seed;
        res.sample = std::move(s);
        res.mixed = std::move(synth.mixed);
        return res;
    } catch (const Error& e) {
        if (const auto r = skip_for(e.code())) return skip(*r, e.what());
        throw;
    }
}

Json to_json(const MixedSample& s) {
    Json j;
    j["id"] = s.id;
    j["real_path"] = s.real_path;
    j["fake_path"] = s.fake_path;
    j["mixed_path"] = s.mixed_path;
    j["region"] = regions::to_string(s.region);

    Json blend;
    blend["method"] = blending::to_string(s.method);
    if (s.method == blending::MethodKind::Alpha) {
        blend["alpha"] = s.alpha;
    } else {
        const auto st = s.poisson.value_or(blending::PoissonStats{});
        blend["iterations"] = st.iterations;
        blend["residual"] = st.residual;
    }
    j["blend"] = blend;

    const auto& v = s.verdicts;
    Json verdicts;
    verdicts["color_difference"] = {{"verdict", v.color.verdict}, {"m", v.color.mean_diff}, {"s", v.color.std_diff}};
    verdicts["blur"] = {{"verdict", v.blur.verdict}, {"real_var", v.blur.real_var}, {"fake_var", v.blur.fake_var}};
    verdicts["structure_abnormal"] = {{"verdict", v.structure.verdict}, {"ssim", v.structure.ssim}};
    verdicts["texture_abnormal"] = {{"verdict", v.texture.verdict},
                                    {"real_contrast", v.texture.real_contrast},
                                    {"fake_contrast", v.texture.fake_contrast}};
    j["verdicts"] = verdicts;

    j["forgery_type"] = typing::phrase(s.forgery_type);
    j["prompt"] = s.prompt;
    Json means;
    for (std::size_t i = 0; i < regions::kAllRegions.size(); ++i)
        means[std::string(regions::to_string(regions::kAllRegions[i]))] = s.region_means[i];
    j["region_means"] = means;
    j["seed"] = s.seed;
    return j;
}

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::InvalidArgument, std::string("missing key '") + key + "'");
    return j[key];
}

template <class T>
T get(const Json& j, const char* key) {
    const Json& v = field(j, key);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::InvalidArgument, std::string("key '") + key + "' has the wrong type");
    }
}

double number(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) throw Error(Errc::InvalidArgument, std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

MixedSample sample_from_json(const Json& j) {
    MixedSample s;
    s.id = get<std::string>(j, "id");
    s.real_path = get<std::string>(j, "real_path");
    s.fake_path = get<std::string>(j, "fake_path");
    s.mixed_path = get<std::string>(j, "mixed_path");
    const auto region = regions::parse_region(get<std::string>(j, "region"));
    if (!region) throw Error(Errc::InvalidArgument, "unknown region");
    s.region = *region;

    const Json& blend = field(j, "blend");
    const auto method = get<std::string>(blend, "method");
    if (method == blending::to_string(blending::MethodKind::Alpha)) {
        s.method = blending::MethodKind::Alpha;
        s.alpha = number(blend, "alpha");
    } else if (method == blending::to_string(blending::MethodKind::Poisson)) {
        s.method = blending::MethodKind::Poisson;
        s.poisson = blending::PoissonStats{get<int>(blend, "iterations"), number(blend, "residual")};
    } else {
        throw Error(Errc::InvalidArgument, "unknown blend method '" + method + "'");
    }

    const Json& v = field(j, "verdicts");
    const Json& c = field(v, "color_difference");
    s.verdicts.color = {get<bool>(c, "verdict"), number(c, "m"), number(c, "s")};
    const Json& b = field(v, "blur");
    s.verdicts.blur = {get<bool>(b, "verdict"), number(b, "real_var"), number(b, "fake_var")};
    const Json& st = field(v, "structure_abnormal");
    s.verdicts.structure = {get<bool>(st, "verdict"), number(st, "ssim")};
    const Json& t = field(v, "texture_abnormal");
    s.verdicts.texture = {get<bool>(t, "verdict"), number(t, "real_contrast"), number(t, "fake_contrast")};

    const auto type = typing::parse_phrase(get<std::string>(j, "forgery_type"));
    if (!type) throw Error(Errc::InvalidArgument, "unknown forgery_type");
    s.forgery_type = *type;
    s.prompt = get<std::string>(j, "prompt");
    const Json& means = field(j, "region_means");
    for (std::size_t i = 0; i < regions::kAllRegions.size(); ++i)
        s.region_means[i] = number(means, std::string(regions::to_string(regions::kAllRegions[i])).c_str());
    s.seed = get<std::uint64_t>(j, "seed");
    return s;
}

std::size_t RunReport::total_skipped() const {
    std::size_t n = 0;
    for (const auto& [_, c] : skipped) n += c;
    return n;
}

Json RunReport::to_json() const {
    Json j;
    j["scanned"] = scanned;
    j["pairs"] = pairs;
    j["emitted"] = emitted;
    Json sk;
    for (auto r : kAllSkipReasons) {
        const auto it = skipped.find(r);
        sk[std::string(to_string(r))] = it == skipped.end() ? 0 : it->second;
    }
    j["skipped"] = sk;
    j["wall_time_s"] = wall_time_s;
    return j;
}

namespace {

struct JobOutcome {
    std::string line;  // empty on skip
    std::optional<SkipReason> skip;
};

}  // namespace

RunReport run(const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const auto ing = ingest(cfg);

    RunReport report;
    report.pairs = ing.triples.size();
    report.scanned = ing.skipped.size() + ing.triples.size() * static_cast<std::size_t>(cfg.samples_per_pair);
    for (const auto& [_, reason] : ing.skipped) ++report.skipped[reason];

    std::error_code ec;
    fs::create_directories(cfg.images_dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + cfg.images_dir.string() + ": " + ec.message());
    if (cfg.manifest.has_parent_path()) fs::create_directories(cfg.manifest.parent_path(), ec);
    std::ofstream manifest(cfg.manifest, std::ios::binary | std::ios::trunc);
    if (!manifest) throw Error(Errc::Io, "cannot write manifest " + cfg.manifest.string());

    const std::size_t k = static_cast<std::size_t>(cfg.samples_per_pair);
    const std::size_t jobs = ing.triples.size() * k;

    std::vector<std::optional<JobOutcome>> done(jobs);
    std::exception_ptr failure;
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};

    auto work = [&] {
        for (std::size_t i = next++; i < jobs && !abort; i = next++) {
            JobOutcome out;
            try {
                const Triple& t = ing.triples[i / k];
                const auto paths = sample_paths(cfg, t, static_cast<int>(i % k));
                std::optional<LoadedTriple> loaded;
                try {
                    loaded = load_triple(t, cfg.landmark_slack);
                } catch (const Error& e) {
                    if (const auto r = skip_for(e.code())) out.skip = r;
                    else throw;
                }
                if (loaded) {
                    auto res = process_pair(*loaded, cfg, paths, sample_seed(cfg.seed, paths.id));
                    if (res.sample) {
                        io::write_png(paths.mixed_file, res.mixed);
                        out.line = to_json(*res.sample).dump() + "\n";
                    } else {
                        out.skip = res.skip;
                    }
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                abort = true;
                cv.notify_all();
                return;
            }
            std::lock_guard lock(mu);
            done[i] = std::move(out);
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(jobs, 1));
    for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(work);

    // order-restoring writer
    for (std::size_t i = 0; i < jobs; ++i) {
        JobOutcome out;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done[i].has_value() || abort.load(); });
            if (!done[i]) break;
            out = std::move(*done[i]);
            done[i].reset();
        }
        if (out.skip) {
            ++report.skipped[*out.skip];
        } else {
            manifest << out.line;
            ++report.emitted;
        }
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    manifest.flush();
    if (!manifest) throw Error(Errc::Io, "write failed for " + cfg.manifest.string());
    manifest.close();

    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.report.empty()) io::write_text(cfg.report, report.to_json().dump(2) + "\n");
    return report;
}

std::vector<LintIssue> lint_manifest(const std::string& jsonl) {
    static const std::vector<std::string> kKeys{"id",     "real_path", "fake_path",    "mixed_path",
                                                "region", "blend",     "verdicts",     "forgery_type",
                                                "prompt", "region_means", "seed"};
    std::vector<LintIssue> issues;
    std::set<std::string> ids;
    std::istringstream in(jsonl);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        auto issue = [&](std::string msg) { issues.push_back({n, std::move(msg)}); };
        const Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            issue("not a JSON object");
            continue;
        }
        std::vector<std::string> keys;
        for (const auto& [key, _] : j.items()) keys.push_back(key);
        if (keys != kKeys) issue("keys are not id, real_path, ..., seed in order");

        MixedSample s;
        try {
            s = sample_from_json(j);
        } catch (const Error& e) {
            issue(e.what());
            continue;
        }
        if (!ids.insert(s.id).second) issue("duplicate id '" + s.id + "'");
        if (s.prompt != prompting::fine_prompt(s.region, s.forgery_type).text)
            issue("prompt does not match region and forgery_type");
        const bool alpha = s.method == blending::MethodKind::Alpha;
        if (alpha != (s.forgery_type == typing::ForgeryType::BlendBoundary))
            issue("blend boundary must go with alpha blending and only with it");
        if (alpha && !(s.alpha >= 0.0 && s.alpha <= 1.0)) issue("alpha outside [0,1]");
        if (!alpha) {
            if (s.poisson->iterations < 0 || !std::isfinite(s.poisson->residual) || s.poisson->residual < 0.0)
                issue("bad poisson statistics");
            bool backed = false;
            switch (s.forgery_type) {
                case typing::ForgeryType::ColorDifference: backed = s.verdicts.color.verdict; break;
                case typing::ForgeryType::Blur: backed = s.verdicts.blur.verdict; break;
                case typing::ForgeryType::StructureAbnormal: backed = s.verdicts.structure.verdict; break;
                case typing::ForgeryType::TextureAbnormal: backed = s.verdicts.texture.verdict; break;
                case typing::ForgeryType::BlendBoundary: break;
            }
            if (!backed) issue("selected type has a False verdict");
        }
        for (double m : s.region_means)
            if (!(m >= 0.0 && m <= 1.0)) issue("region mean outside [0,1]");
        if (!(s.region_means[region_slot(s.region)] > 0.0)) issue("selected region has a zero mask mean");
        if (s.mixed_path.empty() || s.real_path.empty() || s.fake_path.empty()) issue("empty path");
    }
    return issues;
}

}  // namespace forgeprompt::pipeline
