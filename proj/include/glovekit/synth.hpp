#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glovekit {

/// Deterministic synthetic corpus: Zipf-distributed tokens over a
/// generated word list, one document per line. Useful for demo runs,
/// benchmarks and the test fixtures; output depends only on the options.
struct SynthOptions {
    std::uint64_t seed = 42;
    std::size_t target_bytes = 1 << 20;
    std::uint32_t vocab_size = 2000;
    double zipf_exponent = 1.05;
    std::uint32_t min_doc_tokens = 5;
    std::uint32_t max_doc_tokens = 40;
};

std::vector<std::string> synth_word_list(std::uint32_t vocab_size);
void write_synth_corpus(const std::filesystem::path& path, const SynthOptions& opts);

} // namespace glovekit
