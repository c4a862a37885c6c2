#include "glovekit/vocab.hpp"

#include <algorithm>
#include <cinttypes>
#include <fstream>
#include <queue>

#include "glovekit/digest.hpp"
#include "glovekit/errors.hpp"
#include "glovekit/io_util.hpp"

namespace glovekit {
namespace {

bool vocab_order(const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
}

} // namespace

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(entries_.size());
    for (std::uint32_t i = 0; i < entries_.size(); ++i) {
        index_.emplace(entries_[i].word, i);
    }
}

Vocabulary Vocabulary::build(const CountTable& counts, std::uint64_t mft,
                             std::optional<std::uint64_t> max_size) {
    if (mft < 1) throw ValidationError("mft must be >= 1");
    if (max_size && *max_size < 1) throw ValidationError("max_size must be >= 1");
    std::vector<VocabEntry> entries;
    entries.reserve(counts.size());
    for (const auto& [word, count] : counts) {
        if (count >= mft) entries.push_back({word, count});
    }
    std::sort(entries.begin(), entries.end(), vocab_order);
    if (max_size && entries.size() > *max_size) {
        entries.resize(static_cast<std::size_t>(*max_size));
    }
    Vocabulary v;
    v.entries_ = std::move(entries);
    v.rebuild_index();
    return v;
}

Vocabulary Vocabulary::merge(std::span<const CountTable> parts, std::uint64_t mft,
                             std::optional<std::uint64_t> max_size) {
    if (parts.empty()) throw ValidationError("merge requires at least one count table");
    CountTable total;
    for (const auto& part : parts) {
        for (const auto& [word, count] : part) total[word] += count;
    }
    return build(total, mft, max_size);
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write vocabulary '" + path.string() + "'");
    for (const auto& e : entries_) {
        out << e.word << ' ' << e.count << '\n';
    }
    if (!out) throw IoError("write failed for vocabulary '" + path.string() + "'");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary '" + path.string() + "'");
    Vocabulary v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto sp = line.rfind(' ');
        if (sp == std::string::npos || sp == 0) {
            throw ParseError(path.string(), lineno, "expected 'word count'");
        }
        VocabEntry e;
        e.word = line.substr(0, sp);
        char* end = nullptr;
        e.count = std::strtoull(line.c_str() + sp + 1, &end, 10);
        if (end == line.c_str() + sp + 1 || *end != '\0') {
            throw ParseError(path.string(), lineno, "bad count field");
        }
        v.entries_.push_back(std::move(e));
    }
    for (std::size_t i = 1; i < v.entries_.size(); ++i) {
        if (!vocab_order(v.entries_[i - 1], v.entries_[i]) &&
            !(v.entries_[i - 1].count == v.entries_[i].count &&
              v.entries_[i - 1].word == v.entries_[i].word)) {
            throw ParseError(path.string(), i + 1, "vocabulary not in frequency order");
        }
    }
    v.rebuild_index();
    if (v.index_.size() != v.entries_.size()) {
        throw ValidationError("vocabulary '" + path.string() + "' contains duplicate words");
    }
    return v;
}

std::uint64_t Vocabulary::total_count() const {
    std::uint64_t sum = 0;
    for (const auto& e : entries_) sum += e.count;
    return sum;
}

CountTable count_tokens(DocumentSource& docs) {
    docs.reset();
    CountTable counts;
    std::vector<std::string> tokens;
    while (docs.next(tokens)) {
        for (auto& t : tokens) ++counts[t];
    }
    return counts;
}

namespace {

void write_sorted_run(const CountTable& table, const std::filesystem::path& path) {
    std::vector<const CountTable::value_type*> items;
    items.reserve(table.size());
    for (const auto& kv : table) items.push_back(&kv);
    std::sort(items.begin(), items.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write count run '" + path.string() + "'");
    for (const auto* kv : items) {
        out << kv->first << ' ' << kv->second << '\n';
    }
    if (!out) throw IoError("write failed for count run '" + path.string() + "'");
}

} // namespace

std::vector<std::filesystem::path> count_tokens_spilled(DocumentSource& docs,
                                                        const SpillOptions& opts) {
    if (opts.max_entries == 0) throw ValidationError("max_entries must be >= 1");
    docs.reset();
    std::filesystem::create_directories(opts.spill_dir);
    std::vector<std::filesystem::path> runs;
    CountTable table;
    std::vector<std::string> tokens;
    auto flush = [&] {
        if (table.empty()) return;
        auto path = opts.spill_dir / ("counts_run_" + std::to_string(runs.size()) + ".txt");
        write_sorted_run(table, path);
        runs.push_back(path);
        table.clear();
    };
    while (docs.next(tokens)) {
        for (auto& t : tokens) ++table[t];
        if (table.size() >= opts.max_entries) flush();
    }
    flush();
    return runs;
}

Vocabulary build_vocab_from_runs(std::span<const std::filesystem::path> runs,
                                 std::uint64_t mft,
                                 std::optional<std::uint64_t> max_size) {
    if (mft < 1) throw ValidationError("mft must be >= 1");
    struct Cursor {
        std::ifstream in;
        std::string word;
        std::uint64_t count = 0;
        bool advance(const std::filesystem::path& path) {
            std::string line;
            if (!std::getline(in, line)) return false;
            auto sp = line.rfind(' ');
            if (sp == std::string::npos) throw IoError("bad count run line in '" + path.string() + "'");
            word = line.substr(0, sp);
            count = std::strtoull(line.c_str() + sp + 1, nullptr, 10);
            return true;
        }
    };
    std::vector<Cursor> cursors(runs.size());
    using HeapItem = std::pair<std::string_view, std::size_t>;
    auto cmp = [](const HeapItem& a, const HeapItem& b) { return a.first > b.first; };
    std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(cmp)> heap(cmp);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        cursors[k].in.open(runs[k], std::ios::binary);
        if (!cursors[k].in) throw IoError("cannot open count run '" + runs[k].string() + "'");
        if (cursors[k].advance(runs[k])) heap.emplace(cursors[k].word, k);
    }

    // Runs are word-sorted, so each word's total is available as soon as
    // the merge moves past it; only survivors are kept.
    CountTable survivors;
    std::string current;
    std::uint64_t current_sum = 0;
    bool have_current = false;
    auto close_word = [&] {
        if (have_current && current_sum >= mft) survivors.emplace(current, current_sum);
    };
    while (!heap.empty()) {
        std::size_t k = heap.top().second;
        heap.pop();
        if (!have_current || cursors[k].word != current) {
            close_word();
            current = cursors[k].word;
            current_sum = cursors[k].count;
            have_current = true;
        } else {
            current_sum += cursors[k].count;
        }
        if (cursors[k].advance(runs[k])) heap.emplace(cursors[k].word, k);
    }
    close_word();
    return Vocabulary::build(survivors, mft, max_size);
}

CountTable load_count_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open count table '" + path.string() + "'");
    CountTable counts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto sp = line.rfind(' ');
        if (sp == std::string::npos || sp == 0) {
            throw ParseError(path.string(), lineno, "expected 'word count'");
        }
        char* end = nullptr;
        std::uint64_t c = std::strtoull(line.c_str() + sp + 1, &end, 10);
        if (end == line.c_str() + sp + 1 || *end != '\0') {
            throw ParseError(path.string(), lineno, "bad count field");
        }
        counts[line.substr(0, sp)] += c;
    }
    return counts;
}

void save_count_table(const CountTable& counts, const std::filesystem::path& path) {
    write_sorted_run(counts, path);
}

std::string vocabulary_digest(const Vocabulary& vocab) {
    Fnv1a64 h;
    for (const auto& e : vocab.entries()) {
        h.update(e.word);
        h.update(" ", 1);
        auto c = std::to_string(e.count);
        h.update(c);
        h.update("\n", 1);
    }
    return to_hex(h.value());
}

} // namespace glovekit
