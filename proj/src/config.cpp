#include "forgeprompt/config.hpp"

#include <limits>
#include <set>
#include <type_traits>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "forgeprompt/io.hpp"

namespace forgeprompt {
namespace {

namespace fs = std::filesystem;

void reject_unknown(const toml::table& t, const std::string& where, std::initializer_list<std::string_view> known) {
    for (const auto& [k, v] : t) {
        bool ok = false;
        for (auto name : known) ok = ok || k.str() == name;
        if (!ok) throw Error(Errc::Config, "unknown key '" + std::string(k.str()) + "' in " + where);
    }
}

template <class T>
void read_number(const toml::table& t, std::string_view key, const std::string& where, T& out) {
    const auto* node = t.get(key);
    if (!node) return;
    if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node->value<double>()) {
            out = *v;
            return;
        }
    } else {
        if (auto v = node->value<std::int64_t>()) {
            if constexpr (std::is_unsigned_v<T>) {
                if (*v < 0) throw Error(Errc::Config, where + "." + std::string(key) + " must not be negative");
                out = static_cast<T>(*v);
            } else {
                if (*v < std::numeric_limits<T>::min() || *v > std::numeric_limits<T>::max())
                    throw Error(Errc::Config, where + "." + std::string(key) + " is out of range");
                out = static_cast<T>(*v);
            }
            return;
        }
    }
    throw Error(Errc::Config, where + "." + std::string(key) + " has the wrong type");
}

void read_path(const toml::table& t, std::string_view key, const std::string& where, const fs::path& base,
               fs::path& out) {
    const auto* node = t.get(key);
    if (!node) return;
    const auto v = node->value<std::string>();
    if (!v || v->empty()) throw Error(Errc::Config, where + "." + std::string(key) + " must be a non-empty string");
    fs::path p(*v);
    out = (p.is_absolute() ? p : base / p).lexically_normal();
}

const toml::table* section(const toml::table& root, std::string_view name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    const auto* t = node->as_table();
    if (!t) throw Error(Errc::Config, "[" + std::string(name) + "] must be a table");
    return t;
}

}  // namespace

void PipelineConfig::validate() const {
    const std::pair<const char*, const fs::path*> required[] = {
        {"input.real_dir", &real_dir},         {"input.fake_dir", &fake_dir}, {"input.landmarks_dir", &landmarks_dir},
        {"output.images_dir", &images_dir}, {"output.manifest", &manifest}};
    std::set<fs::path> seen;
    for (const auto& [name, p] : required) {
        if (p->empty()) throw Error(Errc::Config, std::string(name) + " is required");
        if (!seen.insert(p->lexically_normal()).second)
            throw Error(Errc::Config, std::string(name) + " collides with another configured path");
    }
    if (!report.empty() && !seen.insert(report.lexically_normal()).second)
        throw Error(Errc::Config, "output.report collides with another configured path");
    if (workers < 1) throw Error(Errc::Config, "workers must be >= 1");
    if (samples_per_pair < 1) throw Error(Errc::Config, "samples_per_pair must be >= 1");
    if (!(theta > 0.0 && theta < 1.0)) throw Error(Errc::Config, "region.theta must lie in (0,1)");
    if (!(landmark_slack >= 0.0)) throw Error(Errc::Config, "region.landmark_slack must be >= 0");
    types.validate();
    blend.validate();
    c2f.validate();
}

PipelineConfig parse_config(const std::string& toml_text, const fs::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw Error(Errc::Config, std::string(e.description()) + " at line " +
                                      std::to_string(e.source().begin.line));
    }
    reject_unknown(root, "top level",
                   {"seed", "workers", "samples_per_pair", "input", "output", "region", "types", "blend", "c2f"});

    PipelineConfig cfg;
    read_number(root, "seed", "config", cfg.seed);
    read_number(root, "workers", "config", cfg.workers);
    read_number(root, "samples_per_pair", "config", cfg.samples_per_pair);

    if (const auto* t = section(root, "input")) {
        reject_unknown(*t, "[input]", {"real_dir", "fake_dir", "landmarks_dir"});
        read_path(*t, "real_dir", "input", base_dir, cfg.real_dir);
        read_path(*t, "fake_dir", "input", base_dir, cfg.fake_dir);
        read_path(*t, "landmarks_dir", "input", base_dir, cfg.landmarks_dir);
    }
    if (const auto* t = section(root, "output")) {
        reject_unknown(*t, "[output]", {"images_dir", "manifest", "report"});
        read_path(*t, "images_dir", "output", base_dir, cfg.images_dir);
        read_path(*t, "manifest", "output", base_dir, cfg.manifest);
        read_path(*t, "report", "output", base_dir, cfg.report);
    }
    if (const auto* t = section(root, "region")) {
        reject_unknown(*t, "[region]", {"theta", "landmark_slack"});
        read_number(*t, "theta", "region", cfg.theta);
        read_number(*t, "landmark_slack", "region", cfg.landmark_slack);
    }
    if (const auto* t = section(root, "types")) {
        reject_unknown(*t, "[types]", {"theta_c_mean", "theta_c_std", "theta_blur", "theta_ssim", "theta_texture"});
        read_number(*t, "theta_c_mean", "types", cfg.types.theta_c_mean);
        read_number(*t, "theta_c_std", "types", cfg.types.theta_c_std);
        read_number(*t, "theta_blur", "types", cfg.types.theta_blur);
        read_number(*t, "theta_ssim", "types", cfg.types.theta_ssim);
        read_number(*t, "theta_texture", "types", cfg.types.theta_texture);
    }
    if (const auto* t = section(root, "blend")) {
        reject_unknown(*t, "[blend]", {"theta_b", "alpha", "tolerance", "max_iters", "solver", "omega"});
        read_number(*t, "theta_b", "blend", cfg.blend.theta_b);
        read_number(*t, "alpha", "blend", cfg.blend.alpha);
        read_number(*t, "tolerance", "blend", cfg.blend.tolerance);
        read_number(*t, "max_iters", "blend", cfg.blend.max_iters);
        read_number(*t, "omega", "blend", cfg.blend.omega);
        if (const auto* node = t->get("solver")) {
            const auto name = node->value<std::string>();
            const auto solver = name ? blending::parse_solver(*name) : std::nullopt;
            if (!solver) throw Error(Errc::Config, "blend.solver must be one of sor, gauss-seidel, cg");
            cfg.blend.solver = *solver;
            if (*name == "gauss-seidel" && !t->get("omega")) cfg.blend.omega = 1.0;
        }
    }
    if (const auto* t = section(root, "c2f")) {
        reject_unknown(*t, "[c2f]", {"phi", "tau", "B", "N", "D"});
        read_number(*t, "phi", "c2f", cfg.c2f.phi);
        read_number(*t, "tau", "c2f", cfg.c2f.tau);
        read_number(*t, "B", "c2f", cfg.c2f.B);
        read_number(*t, "N", "c2f", cfg.c2f.N);
        read_number(*t, "D", "c2f", cfg.c2f.D);
    }
    if (cfg.report.empty() && !cfg.manifest.empty())
        cfg.report = cfg.manifest.parent_path() / (cfg.manifest.stem().string() + ".report.json");
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const fs::path& file) {
    const std::string text = io::read_text(file);
    return parse_config(text, fs::absolute(file).parent_path());
}

}  // namespace forgeprompt
