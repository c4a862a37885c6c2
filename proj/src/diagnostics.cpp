#include "glovekit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Dense>

#include "glovekit/errors.hpp"
#include "glovekit/rng.hpp"
#include "glovekit/shuffle.hpp"

namespace glovekit {

double row_objective(std::uint32_t word_index, std::span<const double> v,
                     const ModelParams& params, std::span<const CoocRecord> row,
                     const TrainConfig& cfg) {
    const std::uint32_t d = params.dim;
    if (v.size() != d) throw ValidationError("candidate vector has wrong dimension");
    double total = 0.0;
    for (const auto& rec : row) {
        if (rec.row != word_index) {
            throw ValidationError("row contains a record for a different word");
        }
        const double* wj = params.wc.data() + std::size_t(rec.col) * d;
        double r = params.b[word_index] + params.bc[rec.col] - std::log(rec.value);
        for (std::uint32_t k = 0; k < d; ++k) r += v[k] * wj[k];
        total += weight(rec.value, cfg.alpha, cfg.xmax) * r * r;
    }
    return total;
}

std::span<const CoocRecord> row_of(std::span<const CoocRecord> sorted_records,
                                   std::uint32_t word_index) {
    auto lo = std::lower_bound(sorted_records.begin(), sorted_records.end(), word_index,
                               [](const CoocRecord& r, std::uint32_t i) { return r.row < i; });
    auto hi = std::upper_bound(sorted_records.begin(), sorted_records.end(), word_index,
                               [](std::uint32_t i, const CoocRecord& r) { return i < r.row; });
    return sorted_records.subspan(static_cast<std::size_t>(lo - sorted_records.begin()),
                                  static_cast<std::size_t>(hi - lo));
}

WlsResult wls_vector(std::uint32_t word_index, const ModelParams& params,
                     std::span<const CoocRecord> row, const TrainConfig& cfg) {
    if (row.empty()) {
        throw ValidationError("no support: word " + std::to_string(word_index) +
                              " has an empty cooccurrence row");
    }
    const std::uint32_t d = params.dim;
    if (word_index >= params.vocab) throw ValidationError("word index out of range");

    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd ctx(d);
    for (const auto& rec : row) {
        if (rec.row != word_index) {
            throw ValidationError("row contains a record for a different word");
        }
        if (rec.col >= params.vocab) throw ValidationError("record column out of range");
        const double f = weight(rec.value, cfg.alpha, cfg.xmax);
        const double* wj = params.wc.data() + std::size_t(rec.col) * d;
        for (std::uint32_t k = 0; k < d; ++k) ctx(k) = wj[k];
        const double target = std::log(rec.value) - params.b[word_index] - params.bc[rec.col];
        normal.selfadjointView<Eigen::Lower>().rankUpdate(ctx, f);
        rhs += f * target * ctx;
    }
    normal = normal.selfadjointView<Eigen::Lower>();

    WlsResult result;
    result.word_index = word_index;
    result.support = row.size();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    Eigen::VectorXd solution = ldlt.solve(rhs);
    // The normal matrix is PSD; a vanishing pivot means rank deficiency
    // even when the system happens to be consistent.
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    const double pivot_tol = pivots.maxCoeff() * 1e-12 * double(d);
    const bool deficient = row.size() < d || pivots.minCoeff() <= pivot_tol;
    const double residual = (normal * solution - rhs).norm();
    const bool ldlt_ok = !deficient && solution.allFinite() &&
                         residual <= 1e-8 * std::max(1.0, rhs.norm());
    if (!ldlt_ok) {
        // Singular system: minimum-norm solution, flagged.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(normal);
        solution = cod.solve(rhs);
        result.rank_deficient = cod.rank() < static_cast<Eigen::Index>(d);
    }

    result.wls.assign(solution.data(), solution.data() + d);
    result.objective_wls = row_objective(word_index, result.wls, params, row, cfg);

    const auto trained = params.w_row(word_index);
    result.objective_trained = row_objective(word_index, trained, params, row, cfg);

    double nw = 0.0, nt = 0.0, dot = 0.0;
    for (std::uint32_t k = 0; k < d; ++k) {
        nw += result.wls[k] * result.wls[k];
        nt += trained[k] * trained[k];
        dot += result.wls[k] * trained[k];
    }
    if (nw > 0.0 && nt > 0.0 && std::isfinite(dot)) {
        result.cosine = dot / std::sqrt(nw * nt);
        result.cosine_defined = true;
    } else {
        result.cosine = std::numeric_limits<double>::quiet_NaN();
        result.cosine_defined = false;
    }
    return result;
}

MftResult mft_selection(DocumentSource& corpus, std::span<const std::uint64_t> candidates,
                        const TrainConfig& cfg, const MftOptions& opts) {
    if (candidates.size() < 2) {
        throw ValidationError("mft selection needs at least 2 candidate thresholds");
    }
    cfg.validate();

    const CountTable counts = count_tokens(corpus);

    MftResult result;
    for (const std::uint64_t mft : candidates) {
        MftScore score;
        score.mft = mft;
        Vocabulary vocab = Vocabulary::build(counts, mft, opts.max_vocab);
        score.vocab_size = vocab.size();
        if (vocab.size() == 0) {
            score.excluded = true;
            score.note = "empty vocabulary";
            result.table.push_back(std::move(score));
            continue;
        }

        CoocOptions copts;
        copts.window = opts.window;
        copts.weighting = opts.weighting;
        copts.memory_budget_bytes = opts.memory_budget_bytes;
        std::vector<CoocRecord> aggregated = build_cooccurrence(corpus, vocab, copts);
        if (aggregated.empty()) {
            score.excluded = true;
            score.note = "no cooccurrences";
            result.table.push_back(std::move(score));
            continue;
        }

        std::vector<CoocRecord> stream = aggregated;
        shuffle_records(stream, opts.shuffle_seed);
        MemoryRecordStore store(std::move(stream));
        TrainResult trained = train(store, vocab.size(), cfg);

        // Sample words whose rows can determine a d-dimensional vector.
        std::vector<std::uint32_t> eligible;
        {
            std::size_t i = 0;
            while (i < aggregated.size()) {
                std::size_t j = i;
                while (j < aggregated.size() && aggregated[j].row == aggregated[i].row) ++j;
                if (j - i >= cfg.dim) eligible.push_back(aggregated[i].row);
                i = j;
            }
        }
        if (eligible.empty()) {
            score.excluded = true;
            score.note = "no rows with support >= dim";
            result.table.push_back(std::move(score));
            continue;
        }
        if (eligible.size() > opts.sample_size) {
            auto rng = substream(opts.sample_seed, RngStage::sampling, mft);
            fisher_yates(std::span<std::uint32_t>(eligible), rng);
            eligible.resize(static_cast<std::size_t>(opts.sample_size));
            std::sort(eligible.begin(), eligible.end());
        }

        double cosine_sum = 0.0;
        std::uint64_t cosine_count = 0;
        for (const std::uint32_t word : eligible) {
            const auto row = row_of(aggregated, word);
            const WlsResult wls = wls_vector(word, trained.params, row, cfg);
            if (wls.cosine_defined) {
                cosine_sum += wls.cosine;
                ++cosine_count;
            }
        }
        if (cosine_count == 0) {
            score.excluded = true;
            score.note = "no defined cosines";
            result.table.push_back(std::move(score));
            continue;
        }
        score.mean_cosine = cosine_sum / double(cosine_count);
        score.sample_size = cosine_count;
        result.table.push_back(std::move(score));
    }

    for (const auto& score : result.table) {
        if (score.excluded) continue;
        if (!result.chosen) {
            result.chosen = score.mft;
            continue;
        }
        const auto& best = *std::find_if(result.table.begin(), result.table.end(),
                                         [&](const MftScore& s) { return s.mft == *result.chosen; });
        if (score.mean_cosine > best.mean_cosine ||
            (score.mean_cosine == best.mean_cosine && score.mft < best.mft)) {
            result.chosen = score.mft;
        }
    }
    return result;
}

void write_mft_table(const MftResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write mft table '" + path.string() + "'");
    out << "mft\tvocab_size\tmean_cosine\tsample_size\tnote\n";
    for (const auto& s : result.table) {
        out << s.mft << '\t' << s.vocab_size << '\t';
        if (s.excluded) {
            out << "nan";
        } else {
            out << s.mean_cosine;
        }
        out << '\t' << s.sample_size << '\t' << (s.excluded ? s.note : "") << '\n';
    }
    if (result.chosen) {
        out << "# chosen\t" << *result.chosen << "\n";
    }
    if (!out) throw IoError("write failed for mft table '" + path.string() + "'");
}

} // namespace glovekit
