#include "glovekit/shuffle.hpp"

#include <algorithm>
#include <filesystem>

#include "glovekit/errors.hpp"
#include "glovekit/rng.hpp"

namespace glovekit {

void shuffle_records(std::vector<CoocRecord>& records, std::uint64_t seed) {
    auto rng = substream(seed, RngStage::shuffle_final, 0);
    fisher_yates(std::span<CoocRecord>(records), rng);
}

CoocMeta shuffle_file(const std::filesystem::path& in_path,
                      const std::filesystem::path& out_path, const ShuffleOptions& opts) {
    if (in_path == out_path) throw ValidationError("cannot shuffle a file onto itself");
    const std::uint64_t total = RecordReader::count_records(in_path);
    const std::uint64_t chunk_capacity =
        std::max<std::uint64_t>(opts.memory_budget_bytes / sizeof(CoocRecord), 1);

    CoocMeta meta;
    const auto meta_in = CoocMeta::meta_path(in_path);
    if (std::filesystem::exists(meta_in)) {
        meta = CoocMeta::load(in_path);
    } else {
        meta.records = total;
        meta.scale = 1;
    }
    meta.kind = "raw";
    meta.shuffle_seed = opts.seed;
    meta.rng = "splitmix64";
    meta.records = total;

    if (total <= chunk_capacity) {
        std::vector<CoocRecord> records = read_all_records(in_path);
        shuffle_records(records, opts.seed);
        RecordWriter writer(out_path);
        writer.write(records);
        writer.close();
        meta.value_sum = writer.value_sum();
        meta.save(out_path);
        return meta;
    }

    const std::uint64_t bucket_count = (total + chunk_capacity - 1) / chunk_capacity;
    if (bucket_count > 1000) {
        throw ValidationError("shuffle would need " + std::to_string(bucket_count) +
                              " temporary buckets; raise the memory budget");
    }
    const auto temp_base = opts.temp_dir.empty() && out_path.has_parent_path()
                               ? out_path.parent_path()
                               : (opts.temp_dir.empty() ? std::filesystem::path(".")
                                                        : opts.temp_dir);

    TempFileGuard cleanup;
    std::vector<std::filesystem::path> bucket_paths;
    bucket_paths.reserve(static_cast<std::size_t>(bucket_count));
    std::vector<RecordWriter> buckets;
    buckets.reserve(static_cast<std::size_t>(bucket_count));
    for (std::uint64_t b = 0; b < bucket_count; ++b) {
        auto p = temp_base / (out_path.filename().string() + ".bucket" + std::to_string(b));
        cleanup.add(p);
        bucket_paths.push_back(p);
        buckets.emplace_back(p, 4096);
    }

    // Stage 1: shuffle each memory-sized chunk, scatter round-robin.
    {
        RecordReader reader(in_path);
        std::vector<CoocRecord> chunk(static_cast<std::size_t>(chunk_capacity));
        std::uint64_t chunk_index = 0;
        std::uint64_t scatter = 0;
        std::size_t got;
        while ((got = reader.read(chunk)) > 0) {
            auto rng = substream(opts.seed, RngStage::shuffle_chunk, chunk_index++);
            fisher_yates(std::span<CoocRecord>(chunk.data(), got), rng);
            for (std::size_t t = 0; t < got; ++t) {
                buckets[static_cast<std::size_t>(scatter % bucket_count)].write(chunk[t]);
                ++scatter;
            }
            if (got < chunk.size()) break;
        }
        for (auto& b : buckets) b.close();
    }

    // Stage 2: shuffle each bucket (round-robin keeps every bucket within
    // one chunk) and concatenate.
    RecordWriter writer(out_path);
    for (std::uint64_t b = 0; b < bucket_count; ++b) {
        auto records = read_all_records(bucket_paths[static_cast<std::size_t>(b)]);
        auto rng = substream(opts.seed, RngStage::shuffle_bucket, b);
        fisher_yates(std::span<CoocRecord>(records), rng);
        writer.write(records);
    }
    writer.close();

    meta.value_sum = writer.value_sum();
    meta.save(out_path);
    return meta;
}

} // namespace glovekit
