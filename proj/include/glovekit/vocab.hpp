#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glovekit/corpus.hpp"

namespace glovekit {

using CountTable = std::unordered_map<std::string, std::uint64_t>;

struct VocabEntry {
    std::string word;
    std::uint64_t count;

    friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

/// Frequency-ordered word list. Entries are sorted by count descending,
/// ties broken by ascending byte order of the word; the position in the
/// list is the word's index everywhere downstream. Counts are 64-bit:
/// hundred-billion-token corpora overflow 32 bits.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Keeps exactly the words with count >= mft, then truncates to the
    /// max_size most frequent under the ordering rule.
    static Vocabulary build(const CountTable& counts, std::uint64_t mft,
                            std::optional<std::uint64_t> max_size = std::nullopt);

    /// Pointwise-sums the tables, then builds. Order-independent, so
    /// shard vocabularies merge to the whole-corpus result.
    static Vocabulary merge(std::span<const CountTable> parts, std::uint64_t mft,
                            std::optional<std::uint64_t> max_size = std::nullopt);

    std::size_t size() const { return entries_.size(); }
    const std::string& word(std::uint32_t index) const { return entries_[index].word; }
    std::uint64_t count(std::uint32_t index) const { return entries_[index].count; }
    const std::vector<VocabEntry>& entries() const { return entries_; }
    std::optional<std::uint32_t> find(std::string_view word) const;

    /// Plain text, one "word count" per line, in vocabulary order (the
    /// format the original GloVe tooling reads and writes).
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    std::uint64_t total_count() const;

private:
    void rebuild_index();

    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Exact occurrence counts over the whole stream. Rewinds the source first.
CountTable count_tokens(DocumentSource& docs);

/// Counting with a bounded in-memory table: when the table exceeds
/// max_entries it is flushed as a word-sorted "word count" run under
/// spill_dir. Runs are merged by summation in build_vocab_from_runs,
/// which holds only words that survive the threshold.
struct SpillOptions {
    std::size_t max_entries = 1u << 22;
    std::filesystem::path spill_dir;
};
std::vector<std::filesystem::path> count_tokens_spilled(DocumentSource& docs,
                                                        const SpillOptions& opts);
Vocabulary build_vocab_from_runs(std::span<const std::filesystem::path> runs,
                                 std::uint64_t mft,
                                 std::optional<std::uint64_t> max_size = std::nullopt);

/// "word count" lines in any order; duplicate words sum.
CountTable load_count_table(const std::filesystem::path& path);
void save_count_table(const CountTable& counts, const std::filesystem::path& path);

/// Content digest over entries in order; stamped into cooccurrence
/// sidecars so downstream stages can detect vocabulary drift.
std::string vocabulary_digest(const Vocabulary& vocab);

} // namespace glovekit
