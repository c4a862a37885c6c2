#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glovekit/embeddings.hpp"
#include "glovekit/vocab.hpp"

namespace glovekit {

struct AnalogyQuestion {
    std::string a, b, c, gold;
};

struct SimilarityPair {
    std::string w1, w2;
    double human_score = 0.0;
};

enum class ItemStatus { correct, incorrect, skipped_oov };

struct ItemOutcome {
    std::size_t index = 0;      // position in the dataset
    ItemStatus status = ItemStatus::skipped_oov;
    std::string predicted;      // analogy only
    double model_score = 0.0;   // similarity only
};

struct EvalReport {
    std::string dataset;
    std::string metric; // "accuracy" or "spearman_rho"
    double value = 0.0;
    std::uint64_t answered = 0;
    std::uint64_t skipped = 0;
    std::vector<ItemOutcome> items;
    // Protocol notes so numbers stay interpretable across tools.
    std::string oov_policy = "skip";
    std::string case_folding = "lowercase";
};

/// Google analogy text format: ": section" headers, then four
/// whitespace-separated words per line.
std::vector<AnalogyQuestion> load_analogy_file(const std::filesystem::path& path);

struct SimilarityFormat {
    char delimiter = '\0'; // '\0' = auto (whitespace, comma, tab, semicolon)
    bool skip_header = false;
    std::string scale; // recorded in reports only
};
std::vector<SimilarityPair> load_similarity_file(const std::filesystem::path& path,
                                                 const SimilarityFormat& fmt = {});

/// Shared normalized view over one embedding set; build once, evaluate
/// many datasets. Lookups lowercase both the dataset word and the
/// vocabulary (first occurrence wins on case collisions).
class Evaluator {
public:
    explicit Evaluator(const EmbeddingSet& emb, std::uint32_t threads = 0);

    /// 3CosAdd: answer = argmax cosine(v, b - a + c) over the vocabulary
    /// minus the three query words, on unit-normalized vectors. Questions
    /// with any out-of-vocabulary word are skipped and counted.
    EvalReport analogy(const std::string& dataset,
                       std::span<const AnalogyQuestion> questions) const;

    /// Cosine scores vs human judgments, Spearman rank correlation with
    /// average ranks for ties. Throws when fewer than two pairs answered.
    EvalReport similarity(const std::string& dataset,
                          std::span<const SimilarityPair> pairs) const;

    /// Top-k by cosine, excluding the query; ties break lexicographically.
    std::vector<std::pair<std::string, double>> nearest_neighbors(const std::string& word,
                                                                  std::size_t k) const;

    std::optional<std::uint32_t> lookup(std::string_view word) const;
    std::span<const double> unit_vector(std::uint32_t i) const {
        return {unit_.data() + std::size_t(i) * emb_->dim(), emb_->dim()};
    }

private:
    const EmbeddingSet* emb_;
    std::vector<double> unit_;
    std::unordered_map<std::string, std::uint32_t> folded_index_;
    std::uint32_t threads_;
};

EvalReport analogy_eval(const EmbeddingSet& emb, std::span<const AnalogyQuestion> questions,
                        std::uint32_t threads = 0);
EvalReport similarity_eval(const EmbeddingSet& emb, std::span<const SimilarityPair> pairs);
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingSet& emb,
                                                              const std::string& word,
                                                              std::size_t k);

/// Spearman rank correlation with average ranks for ties. Throws when
/// n < 2 or either list has no rank variance.
double spearman_rho(std::span<const double> a, std::span<const double> b);
std::vector<double> average_ranks(std::span<const double> values);

struct DiffOptions {
    bool exclude_digit_words = true;    // any ASCII decimal digit
    bool exclude_nonlatin_words = true; // any letter outside A-Z/a-z
};

/// Words present in the new vocabulary but not the old one, filtered and
/// sorted lexicographically.
std::vector<std::string> lexicon_diff(const Vocabulary& new_vocab, const Vocabulary& old_vocab,
                                      const DiffOptions& opts = {});

void write_report_tsv(const EvalReport& report, std::span<const AnalogyQuestion> questions,
                      std::span<const SimilarityPair> pairs, const std::filesystem::path& path);

} // namespace glovekit
