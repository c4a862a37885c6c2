#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glovekit/cooccur.hpp"
#include "glovekit/corpus.hpp"
#include "glovekit/trainer.hpp"
#include "glovekit/vocab.hpp"

namespace glovekit {

struct WlsResult {
    std::uint32_t word_index = 0;
    std::vector<double> wls; // length dim
    double cosine = 0.0;     // trained w_i vs wls; meaningful iff cosine_defined
    bool cosine_defined = false;
    bool rank_deficient = false;
    std::uint64_t support = 0; // nonzero row entries used
    double objective_wls = 0.0;
    double objective_trained = 0.0;
};

/// Weighted row objective sum_j f(x_ij) (v . wc_j + b_i + bc_j - log x_ij)^2
/// for an arbitrary candidate vector v, holding everything else fixed.
double row_objective(std::uint32_t word_index, std::span<const double> v,
                     const ModelParams& params, std::span<const CoocRecord> row,
                     const TrainConfig& cfg);

/// Exact conditional optimizer of word i's vector given fixed context
/// vectors and biases: solves the d x d normal equations with weights
/// f(x_ij). Singular systems fall back to the minimum-norm solution and
/// are flagged. The row must be this word's aggregated records.
WlsResult wls_vector(std::uint32_t word_index, const ModelParams& params,
                     std::span<const CoocRecord> row, const TrainConfig& cfg);

/// Row slice of an aggregated (row-sorted) record stream.
std::span<const CoocRecord> row_of(std::span<const CoocRecord> sorted_records,
                                   std::uint32_t word_index);

struct MftScore {
    std::uint64_t mft = 0;
    std::uint64_t vocab_size = 0;
    double mean_cosine = 0.0;
    std::uint64_t sample_size = 0;
    bool excluded = false;
    std::string note;
};

struct MftResult {
    std::optional<std::uint64_t> chosen;
    std::vector<MftScore> table;
};

struct MftOptions {
    std::uint32_t window = 10;
    Weighting weighting = Weighting::harmonic;
    std::optional<std::uint64_t> max_vocab;
    std::uint64_t shuffle_seed = 123;
    std::uint64_t sample_size = 200; // words entering the mean cosine
    std::uint64_t sample_seed = 7;
    std::size_t memory_budget_bytes = std::size_t{256} << 20;
};

/// Full sweep: for every candidate threshold, build the vocabulary and
/// cooccurrences, train, and average the trained-vs-WLS cosine over a
/// seeded sample of words with support >= dim. Winner is the highest mean
/// cosine; ties go to the smaller threshold. Candidates that produce an
/// empty vocabulary (or no scorable rows) are reported and excluded.
MftResult mft_selection(DocumentSource& corpus, std::span<const std::uint64_t> candidates,
                        const TrainConfig& cfg, const MftOptions& opts = {});

void write_mft_table(const MftResult& result, const std::filesystem::path& path);

} // namespace glovekit
