#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "glovekit/cooccur.hpp"

namespace glovekit {

struct ShuffleOptions {
    std::uint64_t seed = 123;
    std::size_t memory_budget_bytes = std::size_t{256} << 20;
    std::filesystem::path temp_dir; // bucket files; defaults to the output directory
};

/// In-memory Fisher-Yates permutation, seeded; identical to shuffle_file
/// on inputs that fit the budget in one chunk.
void shuffle_records(std::vector<CoocRecord>& records, std::uint64_t seed);

/// External shuffle: inputs beyond the budget are shuffled in memory-sized
/// chunks, scattered round-robin into temporary buckets, and each bucket
/// is shuffled again before concatenation. Output bytes are a pure
/// function of (seed, budget, input). Copies and extends the input's
/// sidecar metadata, marking the output as a raw stream.
CoocMeta shuffle_file(const std::filesystem::path& in_path,
                      const std::filesystem::path& out_path, const ShuffleOptions& opts);

} // namespace glovekit
