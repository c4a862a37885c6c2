#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glovekit/corpus.hpp"
#include "glovekit/io_util.hpp"
#include "glovekit/vocab.hpp"

namespace glovekit {

/// One sparse cell of the cooccurrence matrix. On disk this is exactly
/// 16 bytes, little-endian: u32 row, u32 col, f64 value, indices 0-based.
struct CoocRecord {
    std::uint32_t row;
    std::uint32_t col;
    double value;

    friend bool operator==(const CoocRecord&, const CoocRecord&) = default;
};
static_assert(sizeof(CoocRecord) == 16);

enum class Weighting { harmonic, uniform };

std::string weighting_name(Weighting w);
Weighting weighting_from_name(const std::string& name);

inline constexpr std::uint32_t kMaxWindow = 32;

/// Denominator of the accumulation grid: lcm(1..window) under harmonic
/// weighting, 1 under uniform. Every contribution 1/d is an exact integer
/// multiple of 1/scale, and totals are accumulated as 64-bit integers, so
/// results are independent of accumulation order and shard boundaries.
std::int64_t weight_scale(std::uint32_t window, Weighting weighting);

struct CoocOptions {
    std::uint32_t window = 10;
    Weighting weighting = Weighting::harmonic;
    std::size_t memory_budget_bytes = std::size_t{256} << 20;
    std::filesystem::path temp_dir; // spill runs; defaults to the output directory
};

/// Sidecar metadata written next to every cooccurrence file as
/// "<file>.meta.json".
struct CoocMeta {
    std::uint64_t records = 0;
    std::uint64_t vocab_size = 0;
    std::string vocab_digest;
    std::uint32_t window = 0;
    Weighting weighting = Weighting::harmonic;
    std::int64_t scale = 1;
    double value_sum = 0.0;
    std::string kind = "aggregated"; // "aggregated" (sorted, unique) or "raw"
    std::optional<std::uint64_t> shuffle_seed;
    std::string rng; // set on shuffled files

    void save(const std::filesystem::path& data_path) const;
    static CoocMeta load(const std::filesystem::path& data_path);
    static std::filesystem::path meta_path(const std::filesystem::path& data_path);
};

/// Buffered fixed-width record IO.
class RecordWriter {
public:
    explicit RecordWriter(const std::filesystem::path& path,
                          std::size_t buffer_records = 1u << 16);
    ~RecordWriter();
    RecordWriter(RecordWriter&&) = default;
    RecordWriter& operator=(RecordWriter&&) = default;
    void write(const CoocRecord& rec);
    void write(std::span<const CoocRecord> recs);
    std::uint64_t count() const { return count_; }
    double value_sum() const { return value_sum_; }
    void close();

private:
    void flush();
    File file_;
    std::vector<CoocRecord> buf_;
    std::size_t buffer_records_;
    std::uint64_t count_ = 0;
    double value_sum_ = 0.0;
};

class RecordReader {
public:
    /// Reads records [first, last) of the file; last==UINT64_MAX means EOF.
    explicit RecordReader(const std::filesystem::path& path, std::uint64_t first = 0,
                          std::uint64_t last = UINT64_MAX);
    RecordReader(RecordReader&&) = default;
    RecordReader& operator=(RecordReader&&) = default;
    bool next(CoocRecord& rec);
    std::size_t read(std::span<CoocRecord> out);
    static std::uint64_t count_records(const std::filesystem::path& path);

private:
    File file_;
    std::vector<CoocRecord> buf_;
    std::size_t pos_ = 0;
    std::size_t filled_ = 0;
    std::uint64_t remaining_ = 0;
};

std::vector<CoocRecord> read_all_records(const std::filesystem::path& path);
void write_all_records(const std::filesystem::path& path, std::span<const CoocRecord> recs);

/// Builds the aggregated, (row, col)-sorted cooccurrence stream for a
/// symmetric window: every in-vocabulary pair at distance d within one
/// document contributes weight 1/d (harmonic) or 1 (uniform) to both
/// X[i,j] and X[j,i]. Out-of-vocabulary tokens keep their positions, so
/// distances count through them. Documents never share windows.
std::vector<CoocRecord> build_cooccurrence(DocumentSource& docs, const Vocabulary& vocab,
                                           const CoocOptions& opts = {});

/// Same, streaming to disk with spill runs bounded by the memory budget;
/// writes the sidecar metadata.
CoocMeta build_cooccurrence_file(DocumentSource& docs, const Vocabulary& vocab,
                                 const CoocOptions& opts,
                                 const std::filesystem::path& out_path);

inline constexpr std::int64_t kDropIndex = -1;

/// Index remap from a part vocabulary into a merged vocabulary; words
/// absent from the merged vocabulary map to kDropIndex.
std::vector<std::int64_t> remap_from_vocabs(const Vocabulary& part, const Vocabulary& merged);

/// Sums per-part matrices after remapping indices; output is aggregated
/// and sorted. All parts must share the same scale (window/weighting).
std::vector<CoocRecord> merge_cooccurrences(
    std::span<const std::vector<CoocRecord>> parts,
    std::span<const std::vector<std::int64_t>> remaps, std::uint64_t merged_vocab_size,
    std::int64_t scale);

/// File variant; parts carry their own sidecars, which must agree on
/// window and weighting. Writes data plus sidecar for the merged output.
CoocMeta merge_cooccurrence_files(std::span<const std::filesystem::path> parts,
                                  std::span<const std::vector<std::int64_t>> remaps,
                                  std::uint64_t merged_vocab_size,
                                  const CoocOptions& opts,
                                  const std::filesystem::path& out_path,
                                  const std::string& merged_vocab_digest);

/// Total of all record values in a file (used by invariant checks).
double sum_record_values(const std::filesystem::path& path);

} // namespace glovekit
