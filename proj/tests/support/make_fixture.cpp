// Writes the pipeline fixture and, with --golden, refreshes the golden manifest
// from a single-threaded run.
#include <cstring>
#include <iostream>

#include "fixture.hpp"
#include "forgeprompt/io.hpp"
#include "forgeprompt/pipeline.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_fixture <dir> [--golden]\n";
        return 1;
    }
    const auto cfg_path = fixture::write_pipeline_fixture(argv[1]);
    if (argc > 2 && std::strcmp(argv[2], "--golden") == 0) {
        auto cfg = forgeprompt::load_config(cfg_path);
        cfg.workers = 1;
        const auto report = forgeprompt::pipeline::run(cfg);
        forgeprompt::io::write_text(fixture::golden_manifest_path(), forgeprompt::io::read_text(cfg.manifest));
        std::cout << report.to_json().dump(2) << "\n";
    }
    return 0;
}
