#include "glovekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "glovekit/errors.hpp"
#include "glovekit/rng.hpp"

namespace glovekit {

std::vector<std::string> synth_word_list(std::uint32_t vocab_size) {
    // Pronounceable-ish deterministic words: consonant-vowel syllables
    // keyed to the word's rank, unique by construction.
    static const char* consonants = "bcdfghjklmnprstvz";
    static const char* vowels = "aeiou";
    const std::uint32_t nc = 17, nv = 5;
    std::vector<std::string> words;
    words.reserve(vocab_size);
    for (std::uint32_t r = 0; r < vocab_size; ++r) {
        std::string w;
        std::uint32_t x = r;
        do {
            w.push_back(consonants[x % nc]);
            x /= nc;
            w.push_back(vowels[x % nv]);
            x /= nv;
        } while (x > 0);
        words.push_back(std::move(w));
    }
    return words;
}

void write_synth_corpus(const std::filesystem::path& path, const SynthOptions& opts) {
    if (opts.vocab_size < 1) throw ValidationError("synth vocab_size must be >= 1");
    if (opts.min_doc_tokens < 1 || opts.max_doc_tokens < opts.min_doc_tokens) {
        throw ValidationError("synth doc token bounds are inconsistent");
    }
    const auto words = synth_word_list(opts.vocab_size);

    // Zipf CDF over ranks; inverse-transform sampling.
    std::vector<double> cdf(opts.vocab_size);
    double total = 0.0;
    for (std::uint32_t r = 0; r < opts.vocab_size; ++r) {
        total += 1.0 / std::pow(double(r + 1), opts.zipf_exponent);
        cdf[r] = total;
    }
    for (auto& c : cdf) c /= total;

    auto rng = substream(opts.seed, RngStage::synth, 0);
    auto draw = [&]() -> std::uint32_t {
        const double u = rng.unit();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        return static_cast<std::uint32_t>(std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), opts.vocab_size - 1));
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus '" + path.string() + "'");
    std::size_t written = 0;
    const std::uint32_t doc_span = opts.max_doc_tokens - opts.min_doc_tokens + 1;
    while (written < opts.target_bytes) {
        const std::uint32_t len =
            opts.min_doc_tokens + static_cast<std::uint32_t>(rng.below(doc_span));
        for (std::uint32_t t = 0; t < len; ++t) {
            const auto& w = words[draw()];
            if (t > 0) {
                out << ' ';
                ++written;
            }
            out << w;
            written += w.size();
        }
        out << '\n';
        ++written;
    }
    if (!out) throw IoError("write failed for corpus '" + path.string() + "'");
}

} // namespace glovekit
