#include "glovekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "glovekit/errors.hpp"
#include "glovekit/latin.hpp"

namespace glovekit {
namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    if (delimiter == '\0') {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }
    std::string field;
    for (char c : line) {
        if (c == delimiter) {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

char sniff_delimiter(const std::string& line) {
    if (line.find('\t') != std::string::npos) return '\t';
    if (line.find(',') != std::string::npos) return ',';
    if (line.find(';') != std::string::npos) return ';';
    return '\0'; // whitespace
}

std::string lowercased(std::string s) {
    ascii_lowercase(s);
    return s;
}

} // namespace

std::vector<AnalogyQuestion> load_analogy_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open analogy file '" + path.string() + "'");
    std::vector<AnalogyQuestion> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == ':') continue; // section header
        auto fields = split_fields(line, '\0');
        if (fields.empty()) continue;
        if (fields.size() != 4) {
            throw ParseError(path.string(), lineno,
                             "expected 4 words, got " + std::to_string(fields.size()));
        }
        out.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return out;
}

std::vector<SimilarityPair> load_similarity_file(const std::filesystem::path& path,
                                                 const SimilarityFormat& fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open similarity file '" + path.string() + "'");
    std::vector<SimilarityPair> out;
    std::string line;
    std::size_t lineno = 0;
    char delimiter = fmt.delimiter;
    bool header_pending = fmt.skip_header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (delimiter == '\0' && lineno <= 2) delimiter = sniff_delimiter(line);
        auto fields = split_fields(line, delimiter);
        if (fields.size() != 3) {
            throw ParseError(path.string(), lineno,
                             "expected 'word1 word2 score', got " +
                                 std::to_string(fields.size()) + " fields");
        }
        char* end = nullptr;
        const double score = std::strtod(fields[2].c_str(), &end);
        if (end == fields[2].c_str() || *end != '\0') {
            throw ParseError(path.string(), lineno, "bad score '" + fields[2] + "'");
        }
        out.push_back({fields[0], fields[1], score});
    }
    return out;
}

Evaluator::Evaluator(const EmbeddingSet& emb, std::uint32_t threads)
    : emb_(&emb), threads_(threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : threads) {
    if (emb.size() == 0) throw ValidationError("embedding set is empty");
    const std::uint32_t d = emb.dim();
    unit_.resize(emb.size() * std::size_t(d));
    for (std::uint32_t i = 0; i < emb.size(); ++i) {
        const auto v = emb.vector(i);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        double* out = unit_.data() + std::size_t(i) * d;
        if (norm > 0.0) {
            for (std::uint32_t k = 0; k < d; ++k) out[k] = v[k] / norm;
        } // zero vectors stay zero: cosine with anything is 0
    }
    folded_index_.reserve(emb.size());
    for (std::uint32_t i = 0; i < emb.size(); ++i) {
        folded_index_.emplace(lowercased(emb.word(i)), i); // first wins
    }
}

std::optional<std::uint32_t> Evaluator::lookup(std::string_view word) const {
    auto it = folded_index_.find(lowercased(std::string(word)));
    if (it == folded_index_.end()) return std::nullopt;
    return it->second;
}

namespace {

// Argmax of dot(unit_row, target) over the vocabulary with up to three
// excluded indices; ties keep the lowest index.
std::int64_t scan_argmax(const std::vector<double>& unit, std::uint32_t dim, std::size_t count,
                         std::span<const double> target,
                         std::span<const std::uint32_t> excluded) {
    std::int64_t best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < count; ++v) {
        bool skip = false;
        for (auto e : excluded) {
            if (v == e) {
                skip = true;
                break;
            }
        }
        if (skip) continue;
        const double* row = unit.data() + v * dim;
        double s = 0.0;
        for (std::uint32_t k = 0; k < dim; ++k) s += row[k] * target[k];
        if (s > best_score) {
            best_score = s;
            best = static_cast<std::int64_t>(v);
        }
    }
    return best;
}

} // namespace

EvalReport Evaluator::analogy(const std::string& dataset,
                              std::span<const AnalogyQuestion> questions) const {
    const std::uint32_t d = emb_->dim();
    EvalReport report;
    report.dataset = dataset;
    report.metric = "accuracy";
    report.items.resize(questions.size());

    const std::uint32_t nthreads =
        static_cast<std::uint32_t>(std::min<std::size_t>(threads_, std::max<std::size_t>(questions.size(), 1)));
    auto worker = [&](std::uint32_t t) {
        std::vector<double> target(d);
        for (std::size_t q = t; q < questions.size(); q += nthreads) {
            const auto& question = questions[q];
            ItemOutcome& item = report.items[q];
            item.index = q;
            const auto ia = lookup(question.a);
            const auto ib = lookup(question.b);
            const auto ic = lookup(question.c);
            const auto igold = lookup(question.gold);
            if (!ia || !ib || !ic || !igold) {
                item.status = ItemStatus::skipped_oov;
                continue;
            }
            const double* va = unit_.data() + std::size_t(*ia) * d;
            const double* vb = unit_.data() + std::size_t(*ib) * d;
            const double* vc = unit_.data() + std::size_t(*ic) * d;
            for (std::uint32_t k = 0; k < d; ++k) target[k] = vb[k] - va[k] + vc[k];
            const std::uint32_t excluded[3] = {*ia, *ib, *ic};
            const std::int64_t pred = scan_argmax(unit_, d, emb_->size(), target, excluded);
            if (pred < 0) {
                item.status = ItemStatus::incorrect;
                continue;
            }
            item.predicted = emb_->word(static_cast<std::uint32_t>(pred));
            item.status = static_cast<std::uint32_t>(pred) == *igold ? ItemStatus::correct
                                                                     : ItemStatus::incorrect;
        }
    };
    if (nthreads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    std::uint64_t correct = 0;
    for (const auto& item : report.items) {
        if (item.status == ItemStatus::skipped_oov) {
            ++report.skipped;
        } else {
            ++report.answered;
            if (item.status == ItemStatus::correct) ++correct;
        }
    }
    report.value = report.answered > 0 ? double(correct) / double(report.answered) : 0.0;
    return report;
}

EvalReport Evaluator::similarity(const std::string& dataset,
                                 std::span<const SimilarityPair> pairs) const {
    const std::uint32_t d = emb_->dim();
    EvalReport report;
    report.dataset = dataset;
    report.metric = "spearman_rho";
    report.items.resize(pairs.size());

    std::vector<double> human;
    std::vector<double> model;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        ItemOutcome& item = report.items[q];
        item.index = q;
        const auto i1 = lookup(pairs[q].w1);
        const auto i2 = lookup(pairs[q].w2);
        if (!i1 || !i2) {
            item.status = ItemStatus::skipped_oov;
            ++report.skipped;
            continue;
        }
        const double* v1 = unit_.data() + std::size_t(*i1) * d;
        const double* v2 = unit_.data() + std::size_t(*i2) * d;
        double cos = 0.0;
        for (std::uint32_t k = 0; k < d; ++k) cos += v1[k] * v2[k];
        item.model_score = cos;
        item.status = ItemStatus::correct; // "answered"; correctness n/a
        ++report.answered;
        human.push_back(pairs[q].human_score);
        model.push_back(cos);
    }
    if (report.answered < 2) {
        throw ValidationError("spearman rho undefined: only " + std::to_string(report.answered) +
                              " pairs answered");
    }
    report.value = spearman_rho(model, human);
    return report;
}

std::vector<std::pair<std::string, double>> Evaluator::nearest_neighbors(
    const std::string& word, std::size_t k) const {
    if (k < 1) throw ValidationError("k must be >= 1");
    const auto query = lookup(word);
    if (!query) throw ValidationError("word '" + word + "' not in vocabulary");
    const std::uint32_t d = emb_->dim();
    const double* qv = unit_.data() + std::size_t(*query) * d;

    std::vector<std::pair<double, std::uint32_t>> scored;
    scored.reserve(emb_->size());
    for (std::uint32_t v = 0; v < emb_->size(); ++v) {
        if (v == *query) continue;
        const double* row = unit_.data() + std::size_t(v) * d;
        double s = 0.0;
        for (std::uint32_t kk = 0; kk < d; ++kk) s += row[kk] * qv[kk];
        scored.emplace_back(s, v);
    }
    const std::size_t take = std::min(k, scored.size());
    auto better = [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return emb_->word(x.second) < emb_->word(y.second);
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.emplace_back(emb_->word(scored[i].second), scored[i].first);
    }
    return out;
}

EvalReport analogy_eval(const EmbeddingSet& emb, std::span<const AnalogyQuestion> questions,
                        std::uint32_t threads) {
    return Evaluator(emb, threads).analogy("analogy", questions);
}

EvalReport similarity_eval(const EmbeddingSet& emb, std::span<const SimilarityPair> pairs) {
    return Evaluator(emb, 1).similarity("similarity", pairs);
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingSet& emb,
                                                              const std::string& word,
                                                              std::size_t k) {
    return Evaluator(emb, 1).nearest_neighbors(word, k);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (double(i) + double(j)) / 2.0 + 1.0; // ranks are 1-based
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("rank lists differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("spearman rho undefined for fewer than 2 items");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    double mean = (double(n) + 1.0) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xa = ra[i] - mean;
        const double xb = rb[i] - mean;
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    if (da == 0.0 || db == 0.0) {
        throw ValidationError("spearman rho undefined: a score list has no rank variance");
    }
    return num / std::sqrt(da * db);
}

std::vector<std::string> lexicon_diff(const Vocabulary& new_vocab, const Vocabulary& old_vocab,
                                      const DiffOptions& opts) {
    std::vector<std::string> out;
    for (const auto& e : new_vocab.entries()) {
        if (old_vocab.find(e.word)) continue;
        if (opts.exclude_digit_words && contains_ascii_digit(e.word)) continue;
        if (opts.exclude_nonlatin_words && contains_nonlatin_letter(e.word)) continue;
        out.push_back(e.word);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_report_tsv(const EvalReport& report, std::span<const AnalogyQuestion> questions,
                      std::span<const SimilarityPair> pairs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report '" + path.string() + "'");
    out << "# dataset\t" << report.dataset << "\n# metric\t" << report.metric << "\n# value\t"
        << report.value << "\n# answered\t" << report.answered << "\n# skipped\t"
        << report.skipped << "\n# oov_policy\t" << report.oov_policy << "\n# case_folding\t"
        << report.case_folding << "\n";
    if (!questions.empty()) {
        out << "a\tb\tc\tgold\tpredicted\tstatus\n";
        for (const auto& item : report.items) {
            const auto& q = questions[item.index];
            const char* status = item.status == ItemStatus::correct     ? "correct"
                                 : item.status == ItemStatus::incorrect ? "incorrect"
                                                                        : "skipped_oov";
            out << q.a << '\t' << q.b << '\t' << q.c << '\t' << q.gold << '\t' << item.predicted
                << '\t' << status << '\n';
        }
    } else if (!pairs.empty()) {
        out << "word1\tword2\thuman\tmodel\tstatus\n";
        for (const auto& item : report.items) {
            const auto& p = pairs[item.index];
            const char* status =
                item.status == ItemStatus::skipped_oov ? "skipped_oov" : "answered";
            out << p.w1 << '\t' << p.w2 << '\t' << p.human_score << '\t' << item.model_score
                << '\t' << status << '\n';
        }
    }
    if (!out) throw IoError("write failed for report '" + path.string() + "'");
}

} // namespace glovekit
