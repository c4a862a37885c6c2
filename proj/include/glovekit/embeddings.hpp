#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glovekit/trainer.hpp"
#include "glovekit/vocab.hpp"

namespace glovekit {

enum class ExportMode { sum, focus, concat };

std::string export_mode_name(ExportMode m);
ExportMode export_mode_from_name(const std::string& name);

/// Word-to-vector map with a fixed dimension. Words keep vocabulary
/// order; metadata carries provenance strings (config/corpus digests).
class EmbeddingSet {
public:
    EmbeddingSet() = default;
    EmbeddingSet(std::vector<std::string> words, std::uint32_t dim,
                 std::vector<double> matrix);

    std::size_t size() const { return words_.size(); }
    std::uint32_t dim() const { return dim_; }
    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(std::uint32_t i) const { return words_[i]; }
    std::span<const double> vector(std::uint32_t i) const {
        return {matrix_.data() + std::size_t(i) * dim_, dim_};
    }
    std::optional<std::uint32_t> find(std::string_view word) const;

    std::map<std::string, std::string>& metadata() { return metadata_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    /// One "word v1 ... vd" line per word, no header, decimal text with
    /// the given number of significant digits (the common text vector
    /// format). Reload and re-save reproduce the bytes.
    void save_text(const std::filesystem::path& path, int precision = 6) const;
    static EmbeddingSet load_text(const std::filesystem::path& path);

    /// Full-precision binary format (keeps metadata).
    void save_binary(const std::filesystem::path& path) const;
    static EmbeddingSet load_binary(const std::filesystem::path& path);

private:
    std::vector<std::string> words_;
    std::uint32_t dim_ = 0;
    std::vector<double> matrix_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::map<std::string, std::string> metadata_;
};

/// sum: w_i + wc_i (the usual composition); focus: w_i; concat:
/// [w_i ; wc_i] with dimension 2d.
EmbeddingSet export_embeddings(const ModelParams& params, const Vocabulary& vocab,
                               ExportMode mode = ExportMode::sum);

} // namespace glovekit
