#include "glovekit/cooccur.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>
#include <unordered_map>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "glovekit/digest.hpp"
#include "glovekit/errors.hpp"

namespace glovekit {

static_assert(std::endian::native == std::endian::little,
              "record IO assumes a little-endian host");

std::string weighting_name(Weighting w) {
    return w == Weighting::harmonic ? "harmonic" : "uniform";
}

Weighting weighting_from_name(const std::string& name) {
    if (name == "harmonic") return Weighting::harmonic;
    if (name == "uniform") return Weighting::uniform;
    throw ValidationError("unknown weighting '" + name + "' (harmonic|uniform)");
}

std::int64_t weight_scale(std::uint32_t window, Weighting weighting) {
    if (window < 1 || window > kMaxWindow) {
        throw ValidationError("window must be in [1, " + std::to_string(kMaxWindow) + "]");
    }
    if (weighting == Weighting::uniform) return 1;
    std::int64_t l = 1;
    for (std::uint32_t d = 2; d <= window; ++d) {
        l = std::lcm<std::int64_t>(l, d);
    }
    return l;
}

// ---------------------------------------------------------------------------
// Sidecar metadata

std::filesystem::path CoocMeta::meta_path(const std::filesystem::path& data_path) {
    auto p = data_path;
    p += ".meta.json";
    return p;
}

void CoocMeta::save(const std::filesystem::path& data_path) const {
    nlohmann::json j{
        {"format", 1},
        {"records", records},
        {"vocab_size", vocab_size},
        {"vocab_digest", vocab_digest},
        {"window", window},
        {"weighting", weighting_name(weighting)},
        {"scale", scale},
        {"value_sum", value_sum},
        {"kind", kind},
    };
    if (shuffle_seed) {
        j["shuffle_seed"] = *shuffle_seed;
        j["rng"] = rng;
    }
    atomic_write_file(meta_path(data_path), j.dump(2) + "\n");
}

CoocMeta CoocMeta::load(const std::filesystem::path& data_path) {
    const auto path = meta_path(data_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    CoocMeta m;
    try {
        m.records = j.at("records").get<std::uint64_t>();
        m.vocab_size = j.at("vocab_size").get<std::uint64_t>();
        m.vocab_digest = j.value("vocab_digest", "");
        m.window = j.at("window").get<std::uint32_t>();
        m.weighting = weighting_from_name(j.at("weighting").get<std::string>());
        m.scale = j.at("scale").get<std::int64_t>();
        m.value_sum = j.value("value_sum", 0.0);
        m.kind = j.value("kind", "aggregated");
        if (j.contains("shuffle_seed")) {
            m.shuffle_seed = j["shuffle_seed"].get<std::uint64_t>();
            m.rng = j.value("rng", "");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Record IO

namespace {
constexpr std::size_t kIoBufRecords = 1u << 16;
}

RecordWriter::RecordWriter(const std::filesystem::path& path, std::size_t buffer_records)
    : file_(path, "wb"), buffer_records_(std::max<std::size_t>(buffer_records, 1)) {}

RecordWriter::~RecordWriter() = default;

void RecordWriter::flush() {
    if (!buf_.empty()) {
        file_.write(buf_.data(), buf_.size() * sizeof(CoocRecord));
        buf_.clear();
    }
}

void RecordWriter::write(const CoocRecord& rec) {
    buf_.push_back(rec);
    ++count_;
    value_sum_ += rec.value;
    if (buf_.size() >= buffer_records_) flush();
}

void RecordWriter::write(std::span<const CoocRecord> recs) {
    for (const auto& r : recs) write(r);
}

void RecordWriter::close() {
    flush();
    file_.close();
}

RecordReader::RecordReader(const std::filesystem::path& path, std::uint64_t first,
                           std::uint64_t last)
    : file_(path, "rb") {
    const std::uint64_t total = count_records(path);
    if (last == UINT64_MAX || last > total) last = total;
    if (first > last) first = last;
    remaining_ = last - first;
    if (first > 0) file_.seek(first * sizeof(CoocRecord));
    buf_.resize(std::min<std::uint64_t>(kIoBufRecords, std::max<std::uint64_t>(remaining_, 1)));
}

std::uint64_t RecordReader::count_records(const std::filesystem::path& path) {
    const auto bytes = glovekit::file_size(path);
    if (bytes % sizeof(CoocRecord) != 0) {
        throw IoError("'" + path.string() + "' is not a whole number of 16-byte records");
    }
    return bytes / sizeof(CoocRecord);
}

std::size_t RecordReader::read(std::span<CoocRecord> out) {
    std::size_t got = 0;
    while (got < out.size()) {
        if (pos_ == filled_) {
            const std::uint64_t want =
                std::min<std::uint64_t>(buf_.size(), remaining_);
            if (want == 0) break;
            const std::size_t n =
                file_.read_some(buf_.data(), static_cast<std::size_t>(want) * sizeof(CoocRecord));
            if (n % sizeof(CoocRecord) != 0) {
                throw IoError("truncated record in '" + file_.path().string() + "'");
            }
            filled_ = n / sizeof(CoocRecord);
            pos_ = 0;
            if (filled_ == 0) {
                throw IoError("unexpected end of records in '" + file_.path().string() + "'");
            }
            remaining_ -= filled_;
        }
        const std::size_t take = std::min(out.size() - got, filled_ - pos_);
        std::memcpy(out.data() + got, buf_.data() + pos_, take * sizeof(CoocRecord));
        got += take;
        pos_ += take;
    }
    return got;
}

bool RecordReader::next(CoocRecord& rec) {
    return read(std::span<CoocRecord>(&rec, 1)) == 1;
}

std::vector<CoocRecord> read_all_records(const std::filesystem::path& path) {
    const auto n = RecordReader::count_records(path);
    std::vector<CoocRecord> out(static_cast<std::size_t>(n));
    if (n > 0) {
        RecordReader reader(path);
        if (reader.read(out) != n) throw IoError("short read from '" + path.string() + "'");
    }
    return out;
}

void write_all_records(const std::filesystem::path& path, std::span<const CoocRecord> recs) {
    RecordWriter w(path);
    w.write(recs);
    w.close();
}

// ---------------------------------------------------------------------------
// Aggregating accumulator: dense int64 block for the most frequent f*f
// index pairs plus a hash tail that spills sorted runs. All weights live
// on the 1/scale grid, so sums are exact integers and the final merge is
// order-independent.

namespace {

struct RunRecord {
    std::uint32_t row;
    std::uint32_t col;
    std::int64_t ticks;
};
static_assert(sizeof(RunRecord) == 16);

inline std::uint64_t cell_key(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

std::filesystem::path unique_temp_dir(const std::filesystem::path& base) {
    static std::atomic<std::uint64_t> counter{0};
    auto dir = base / ("glovekit_spill_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

class Aggregator {
public:
    Aggregator(std::uint64_t vocab_size, const CoocOptions& opts,
               const std::filesystem::path& temp_base)
        : temp_base_(temp_base) {
        const std::size_t budget = std::max<std::size_t>(opts.memory_budget_bytes, 1u << 20);
        const auto dense_budget = budget / 2;
        dense_side_ = static_cast<std::uint32_t>(std::min<std::uint64_t>(
            vocab_size, static_cast<std::uint64_t>(std::sqrt(double(dense_budget) / 8.0))));
        dense_.assign(static_cast<std::size_t>(dense_side_) * dense_side_, 0);
        tail_max_ = std::max<std::size_t>((budget - dense_budget) / 48, 1024);
        tail_.reserve(tail_max_ + tail_max_ / 8);
    }

    ~Aggregator() {
        if (!runs_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(run_dir_, ec);
        }
    }

    void add(std::uint32_t i, std::uint32_t j, std::int64_t ticks) {
        if (i < dense_side_ && j < dense_side_) {
            auto& cell = dense_[static_cast<std::size_t>(i) * dense_side_ + j];
            if (__builtin_add_overflow(cell, ticks, &cell)) {
                throw std::runtime_error("cooccurrence accumulator overflow; reduce the window");
            }
            return;
        }
        auto& cell = tail_[cell_key(i, j)];
        if (__builtin_add_overflow(cell, ticks, &cell)) {
            throw std::runtime_error("cooccurrence accumulator overflow; reduce the window");
        }
        if (tail_.size() >= tail_max_) spill();
    }

    /// Emits aggregated cells in (row, col) order. emit(i, j, ticks).
    template <typename Emit>
    void finalize(Emit&& emit) {
        std::vector<std::pair<std::uint64_t, std::int64_t>> tail_sorted(tail_.begin(),
                                                                        tail_.end());
        tail_.clear();
        std::sort(tail_sorted.begin(), tail_sorted.end());

        std::vector<RecordReader> readers;
        readers.reserve(runs_.size());
        for (const auto& r : runs_) readers.emplace_back(r);

        // Cursors over: spilled runs, the sorted tail, and the dense block.
        struct Cursor {
            std::uint64_t key;
            std::int64_t ticks;
            std::size_t src; // run index, or SIZE_MAX-1 = tail, SIZE_MAX = dense
        };
        auto cmp = [](const Cursor& a, const Cursor& b) { return a.key > b.key; };
        std::priority_queue<Cursor, std::vector<Cursor>, decltype(cmp)> heap(cmp);

        constexpr std::size_t kTailSrc = SIZE_MAX - 1;
        constexpr std::size_t kDenseSrc = SIZE_MAX;

        std::size_t tail_pos = 0;
        auto push_tail = [&] {
            if (tail_pos < tail_sorted.size()) {
                heap.push({tail_sorted[tail_pos].first, tail_sorted[tail_pos].second, kTailSrc});
                ++tail_pos;
            }
        };
        std::uint64_t dense_pos = 0;
        const std::uint64_t dense_cells = dense_.size();
        auto push_dense = [&] {
            while (dense_pos < dense_cells) {
                if (dense_[static_cast<std::size_t>(dense_pos)] != 0) {
                    const auto i = static_cast<std::uint32_t>(dense_pos / dense_side_);
                    const auto j = static_cast<std::uint32_t>(dense_pos % dense_side_);
                    heap.push({cell_key(i, j), dense_[static_cast<std::size_t>(dense_pos)],
                               kDenseSrc});
                    ++dense_pos;
                    return;
                }
                ++dense_pos;
            }
        };
        auto push_run = [&](std::size_t k) {
            CoocRecord raw;
            if (readers[k].next(raw)) {
                RunRecord rr;
                std::memcpy(&rr, &raw, sizeof rr);
                heap.push({cell_key(rr.row, rr.col), rr.ticks, k});
            }
        };

        push_tail();
        push_dense();
        for (std::size_t k = 0; k < readers.size(); ++k) push_run(k);

        bool have = false;
        std::uint64_t cur_key = 0;
        std::int64_t cur_ticks = 0;
        auto close_cell = [&] {
            if (have && cur_ticks != 0) {
                emit(static_cast<std::uint32_t>(cur_key >> 32),
                     static_cast<std::uint32_t>(cur_key & 0xFFFFFFFFu), cur_ticks);
            }
        };
        while (!heap.empty()) {
            Cursor c = heap.top();
            heap.pop();
            if (!have || c.key != cur_key) {
                close_cell();
                cur_key = c.key;
                cur_ticks = c.ticks;
                have = true;
            } else if (__builtin_add_overflow(cur_ticks, c.ticks, &cur_ticks)) {
                throw std::runtime_error("cooccurrence overflow while merging runs");
            }
            if (c.src == kTailSrc) {
                push_tail();
            } else if (c.src == kDenseSrc) {
                push_dense();
            } else {
                push_run(c.src);
            }
        }
        close_cell();
    }

private:
    void spill() {
        if (runs_.empty()) run_dir_ = unique_temp_dir(temp_base_);
        std::vector<std::pair<std::uint64_t, std::int64_t>> items(tail_.begin(), tail_.end());
        tail_.clear();
        std::sort(items.begin(), items.end());
        auto path = run_dir_ / ("run_" + std::to_string(runs_.size()) + ".bin");
        File f(path, "wb");
        std::vector<RunRecord> buf;
        buf.reserve(kIoBufRecords);
        for (const auto& [key, ticks] : items) {
            buf.push_back({static_cast<std::uint32_t>(key >> 32),
                           static_cast<std::uint32_t>(key & 0xFFFFFFFFu), ticks});
            if (buf.size() == kIoBufRecords) {
                f.write(buf.data(), buf.size() * sizeof(RunRecord));
                buf.clear();
            }
        }
        if (!buf.empty()) f.write(buf.data(), buf.size() * sizeof(RunRecord));
        f.close();
        runs_.push_back(path);
    }

    std::filesystem::path temp_base_;
    std::filesystem::path run_dir_;
    std::uint32_t dense_side_ = 0;
    std::vector<std::int64_t> dense_;
    std::unordered_map<std::uint64_t, std::int64_t> tail_;
    std::size_t tail_max_;
    std::vector<std::filesystem::path> runs_;
};

constexpr std::uint32_t kOovId = UINT32_MAX;

template <typename Emit>
void build_into(DocumentSource& docs, const Vocabulary& vocab, const CoocOptions& opts,
                const std::filesystem::path& temp_base, Emit&& emit) {
    const std::int64_t scale = weight_scale(opts.window, opts.weighting);
    std::vector<std::int64_t> tick_at_distance(opts.window + 1, 1);
    for (std::uint32_t d = 1; d <= opts.window; ++d) {
        tick_at_distance[d] = opts.weighting == Weighting::harmonic ? scale / d : 1;
    }

    Aggregator acc(vocab.size(), opts, temp_base);
    docs.reset();
    std::vector<std::string> tokens;
    std::vector<std::uint32_t> ids;
    while (docs.next(tokens)) {
        ids.clear();
        ids.reserve(tokens.size());
        for (const auto& t : tokens) {
            auto idx = vocab.find(t);
            ids.push_back(idx ? *idx : kOovId);
        }
        const std::size_t n = ids.size();
        for (std::size_t p = 0; p < n; ++p) {
            const std::uint32_t focus = ids[p];
            if (focus == kOovId) continue;
            const std::size_t dmax = std::min<std::size_t>(opts.window, p);
            for (std::size_t d = 1; d <= dmax; ++d) {
                const std::uint32_t ctx = ids[p - d];
                if (ctx == kOovId) continue;
                const std::int64_t ticks = tick_at_distance[d];
                acc.add(focus, ctx, ticks);
                acc.add(ctx, focus, ticks);
            }
        }
    }
    acc.finalize(emit);
}

} // namespace

std::vector<CoocRecord> build_cooccurrence(DocumentSource& docs, const Vocabulary& vocab,
                                           const CoocOptions& opts) {
    const std::int64_t scale = weight_scale(opts.window, opts.weighting);
    const auto temp_base = opts.temp_dir.empty() ? std::filesystem::temp_directory_path()
                                                 : opts.temp_dir;
    std::vector<CoocRecord> out;
    build_into(docs, vocab, opts, temp_base,
               [&](std::uint32_t i, std::uint32_t j, std::int64_t ticks) {
                   out.push_back({i, j, static_cast<double>(ticks) / double(scale)});
               });
    return out;
}

CoocMeta build_cooccurrence_file(DocumentSource& docs, const Vocabulary& vocab,
                                 const CoocOptions& opts,
                                 const std::filesystem::path& out_path) {
    const std::int64_t scale = weight_scale(opts.window, opts.weighting);
    const auto temp_base = opts.temp_dir.empty() && out_path.has_parent_path()
                               ? out_path.parent_path()
                               : (opts.temp_dir.empty() ? std::filesystem::path(".")
                                                        : opts.temp_dir);
    RecordWriter writer(out_path);
    build_into(docs, vocab, opts, temp_base,
               [&](std::uint32_t i, std::uint32_t j, std::int64_t ticks) {
                   writer.write({i, j, static_cast<double>(ticks) / double(scale)});
               });
    writer.close();

    CoocMeta meta;
    meta.records = writer.count();
    meta.vocab_size = vocab.size();
    meta.vocab_digest = vocabulary_digest(vocab);
    meta.window = opts.window;
    meta.weighting = opts.weighting;
    meta.scale = scale;
    meta.value_sum = writer.value_sum();
    meta.kind = "aggregated";
    meta.save(out_path);
    return meta;
}

std::vector<std::int64_t> remap_from_vocabs(const Vocabulary& part, const Vocabulary& merged) {
    std::vector<std::int64_t> remap(part.size(), kDropIndex);
    for (std::uint32_t i = 0; i < part.size(); ++i) {
        if (auto idx = merged.find(part.word(i))) remap[i] = *idx;
    }
    return remap;
}

namespace {

// Recovers the integer tick count of a grid value. Values written by the
// builder are exact multiples of 1/scale; anything else is rejected so
// merges never silently re-quantize foreign data.
std::int64_t ticks_of(double value, std::int64_t scale) {
    const double scaled = value * static_cast<double>(scale);
    const double rounded = std::nearbyint(scaled);
    if (!std::isfinite(scaled) || std::fabs(scaled - rounded) > 1e-6 * std::max(1.0, std::fabs(scaled))) {
        throw ValidationError("cooccurrence value " + std::to_string(value) +
                              " is not on the 1/" + std::to_string(scale) + " grid");
    }
    return static_cast<std::int64_t>(rounded);
}

void apply_remap(std::uint32_t i, std::uint32_t j, std::int64_t ticks,
                 std::span<const std::int64_t> remap, std::uint64_t merged_vocab_size,
                 Aggregator& acc) {
    if (i >= remap.size() || j >= remap.size()) {
        throw ValidationError("record index exceeds the part remap size");
    }
    const std::int64_t ni = remap[i];
    const std::int64_t nj = remap[j];
    if (ni == kDropIndex || nj == kDropIndex) return;
    if (ni < 0 || nj < 0 || static_cast<std::uint64_t>(ni) >= merged_vocab_size ||
        static_cast<std::uint64_t>(nj) >= merged_vocab_size) {
        throw ValidationError("remap points outside the merged vocabulary");
    }
    acc.add(static_cast<std::uint32_t>(ni), static_cast<std::uint32_t>(nj), ticks);
}

} // namespace

std::vector<CoocRecord> merge_cooccurrences(
    std::span<const std::vector<CoocRecord>> parts,
    std::span<const std::vector<std::int64_t>> remaps, std::uint64_t merged_vocab_size,
    std::int64_t scale) {
    if (parts.size() != remaps.size()) {
        throw ValidationError("merge needs one remap per part");
    }
    if (parts.empty()) throw ValidationError("merge requires at least one part");
    CoocOptions opts;
    Aggregator acc(merged_vocab_size, opts, std::filesystem::temp_directory_path());
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (const auto& rec : parts[p]) {
            apply_remap(rec.row, rec.col, ticks_of(rec.value, scale), remaps[p],
                        merged_vocab_size, acc);
        }
    }
    std::vector<CoocRecord> out;
    acc.finalize([&](std::uint32_t i, std::uint32_t j, std::int64_t ticks) {
        out.push_back({i, j, static_cast<double>(ticks) / double(scale)});
    });
    return out;
}

CoocMeta merge_cooccurrence_files(std::span<const std::filesystem::path> parts,
                                  std::span<const std::vector<std::int64_t>> remaps,
                                  std::uint64_t merged_vocab_size,
                                  const CoocOptions& opts,
                                  const std::filesystem::path& out_path,
                                  const std::string& merged_vocab_digest) {
    if (parts.size() != remaps.size()) {
        throw ValidationError("merge needs one remap per part");
    }
    if (parts.empty()) throw ValidationError("merge requires at least one part");

    CoocMeta first = CoocMeta::load(parts[0]);
    for (std::size_t p = 1; p < parts.size(); ++p) {
        CoocMeta m = CoocMeta::load(parts[p]);
        if (m.window != first.window || m.weighting != first.weighting ||
            m.scale != first.scale) {
            throw ValidationError("part '" + parts[p].string() +
                                  "' disagrees on window/weighting with the first part");
        }
    }

    const auto temp_base = opts.temp_dir.empty() && out_path.has_parent_path()
                               ? out_path.parent_path()
                               : (opts.temp_dir.empty() ? std::filesystem::path(".")
                                                        : opts.temp_dir);
    CoocOptions acc_opts = opts;
    acc_opts.window = first.window;
    acc_opts.weighting = first.weighting;
    Aggregator acc(merged_vocab_size, acc_opts, temp_base);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        RecordReader reader(parts[p]);
        CoocRecord rec;
        while (reader.next(rec)) {
            apply_remap(rec.row, rec.col, ticks_of(rec.value, first.scale), remaps[p],
                        merged_vocab_size, acc);
        }
    }
    RecordWriter writer(out_path);
    acc.finalize([&](std::uint32_t i, std::uint32_t j, std::int64_t ticks) {
        writer.write({i, j, static_cast<double>(ticks) / double(first.scale)});
    });
    writer.close();

    CoocMeta meta;
    meta.records = writer.count();
    meta.vocab_size = merged_vocab_size;
    meta.vocab_digest = merged_vocab_digest;
    meta.window = first.window;
    meta.weighting = first.weighting;
    meta.scale = first.scale;
    meta.value_sum = writer.value_sum();
    meta.kind = "aggregated";
    meta.save(out_path);
    return meta;
}

double sum_record_values(const std::filesystem::path& path) {
    RecordReader reader(path);
    CoocRecord rec;
    double sum = 0.0;
    while (reader.next(rec)) sum += rec.value;
    return sum;
}

} // namespace glovekit
