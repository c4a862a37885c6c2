#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glovekit/cooccur.hpp"
#include "glovekit/embeddings.hpp"
#include "glovekit/eval.hpp"
#include "glovekit/trainer.hpp"

namespace glovekit {

/// Resuming into a workdir that holds incomplete outputs from a different
/// configuration; exit code 3.
struct ResumeConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnalogyDatasetConfig {
    std::string name;
    std::filesystem::path path;
};

struct SimilarityDatasetConfig {
    std::string name;
    std::filesystem::path path;
    SimilarityFormat format;
};

struct WlsStageConfig {
    std::uint64_t sample_size = 200;
    std::uint64_t sample_seed = 7;
};

/// Whole-pipeline configuration, read from one JSON file. Relative paths
/// resolve against the config file's directory. Hyperparameters default
/// to the standard training profile; the global seed feeds both the
/// shuffle and the parameter init unless overridden per stage.
struct PipelineConfig {
    std::filesystem::path workdir = "run";
    std::filesystem::path corpus_manifest;

    std::uint64_t mft = 20;
    std::optional<std::uint64_t> max_vocab;
    std::optional<std::size_t> vocab_spill_entries;

    std::uint32_t window = 10;
    Weighting weighting = Weighting::harmonic;
    std::size_t cooccur_memory_mb = 256;

    std::uint64_t seed = 2024;
    std::optional<std::uint64_t> shuffle_seed;
    std::size_t shuffle_memory_mb = 256;

    TrainConfig train; // train.seed inherits `seed` unless set explicitly
    bool train_seed_explicit = false;

    ExportMode export_mode = ExportMode::sum;
    int export_precision = 6;
    bool export_binary = false;

    std::vector<AnalogyDatasetConfig> analogy_datasets;
    std::vector<SimilarityDatasetConfig> similarity_datasets;
    std::uint32_t eval_threads = 0;

    std::optional<WlsStageConfig> wls;

    static PipelineConfig load(const std::filesystem::path& path);
    void validate() const;

    std::uint64_t effective_shuffle_seed() const { return shuffle_seed.value_or(seed); }
    TrainConfig effective_train() const;
};

struct PipelineOverrides {
    std::optional<std::filesystem::path> workdir;
    std::optional<std::uint32_t> threads;
    std::optional<std::uint64_t> seed;
    bool force = false; // clear incomplete markers instead of failing
};

struct StageSummary {
    std::string name;
    bool cache_hit = false;
    double seconds = 0.0;
};

struct PipelineResult {
    std::vector<StageSummary> stages;
    std::filesystem::path workdir;
    std::filesystem::path manifest_path;
};

/// Runs vocab -> cooccur -> shuffle -> train -> export (-> eval -> wls)
/// with content-digest staging: stages whose inputs, parameters and
/// outputs all match the run manifest are skipped. Each stage writes an
/// ".incomplete" marker while running; the run manifest is rewritten
/// atomically after every stage. One instance per workdir (lock file).
PipelineResult run_pipeline(const std::filesystem::path& config_path,
                            const PipelineOverrides& overrides = {});

} // namespace glovekit
