// Writes a self-contained demo workspace: a deterministic synthetic
// corpus, its manifest, and a pipeline config pointed at them. Useful for
// trying the CLI without a real corpus.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "glovekit/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a demo corpus, manifest and pipeline config"};
    std::string dir = "demo";
    std::size_t size_kb = 1024;
    std::uint64_t seed = 42;
    std::uint32_t vocab = 2000;
    app.add_option("--dir", dir, "Output directory (default: demo)");
    app.add_option("--size-kb", size_kb, "Corpus size in KiB (default 1024)");
    app.add_option("--seed", seed, "Generator seed (default 42)");
    app.add_option("--vocab", vocab, "Synthetic vocabulary size (default 2000)");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(dir);
        const auto base = std::filesystem::path(dir);

        glovekit::SynthOptions opts;
        opts.seed = seed;
        opts.target_bytes = size_kb * 1024;
        opts.vocab_size = vocab;
        glovekit::write_synth_corpus(base / "corpus.txt", opts);

        std::ofstream manifest(base / "corpus.manifest");
        manifest << "lowercase true\n"
                 << "stop-token <unk>\n"
                 << "stop-token <doc>\n"
                 << "source corpus.txt 1\n";

        std::ofstream config(base / "pipeline.json");
        config << R"({
  "workdir": "run",
  "corpus": {"manifest": "corpus.manifest"},
  "vocab": {"mft": 5},
  "cooccur": {"window": 10, "weighting": "harmonic", "memory_mb": 128},
  "seed": 123,
  "train": {"dim": 50, "eta": 0.05, "epochs": 15, "threads": 1},
  "export": {"mode": "sum", "precision": 6},
  "wls": {"sample": 100, "seed": 7}
}
)";
        std::printf("demo workspace in %s; run:\n  glovekit run --config %s/pipeline.json\n",
                    dir.c_str(), dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
