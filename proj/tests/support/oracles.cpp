#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glovekit/rng.hpp"

namespace glovekit::testing {

CellMap brute_force_cooccurrence(const Docs& docs, const Vocabulary& vocab,
                                 std::uint32_t window, Weighting weighting) {
    CellMap cells;
    for (const auto& doc : docs) {
        std::vector<std::int64_t> ids(doc.size(), -1);
        for (std::size_t t = 0; t < doc.size(); ++t) {
            if (auto idx = vocab.find(doc[t])) ids[t] = *idx;
        }
        for (std::size_t p = 0; p < doc.size(); ++p) {
            if (ids[p] < 0) continue;
            for (std::size_t d = 1; d <= window && d <= p; ++d) {
                if (ids[p - d] < 0) continue;
                const double w = weighting == Weighting::harmonic ? 1.0 / double(d) : 1.0;
                const auto i = static_cast<std::uint32_t>(ids[p]);
                const auto j = static_cast<std::uint32_t>(ids[p - d]);
                cells[{i, j}] += w;
                cells[{j, i}] += w;
            }
        }
    }
    return cells;
}

CellMap to_cell_map(std::span<const CoocRecord> records) {
    CellMap cells;
    for (const auto& r : records) cells[{r.row, r.col}] += r.value;
    return cells;
}

std::string compare_cooccurrence(std::span<const CoocRecord> records, const CellMap& expected,
                                 double tolerance) {
    const CellMap got = to_cell_map(records);
    std::ostringstream oss;
    if (got.size() != expected.size()) {
        oss << "cell count mismatch: got " << got.size() << ", expected " << expected.size();
        return oss.str();
    }
    auto it_got = got.begin();
    auto it_exp = expected.begin();
    for (; it_exp != expected.end(); ++it_exp, ++it_got) {
        if (it_got->first != it_exp->first) {
            oss << "cell key mismatch at (" << it_exp->first.first << ", "
                << it_exp->first.second << ")";
            return oss.str();
        }
        const double a = it_got->second;
        const double b = it_exp->second;
        if (std::fabs(a - b) > tolerance * std::max({1.0, std::fabs(a), std::fabs(b)})) {
            oss << "value mismatch at (" << it_exp->first.first << ", " << it_exp->first.second
                << "): got " << a << ", expected " << b;
            return oss.str();
        }
    }
    return {};
}

std::vector<double> brute_force_wls(std::uint32_t word_index, const ModelParams& params,
                                    std::span<const CoocRecord> row, const TrainConfig& cfg) {
    const std::uint32_t d = params.dim;
    std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
    std::vector<double> rhs(d, 0.0);
    for (const auto& rec : row) {
        const double f = weight(rec.value, cfg.alpha, cfg.xmax);
        const double* wj = params.wc.data() + std::size_t(rec.col) * d;
        const double target = std::log(rec.value) - params.b[word_index] - params.bc[rec.col];
        for (std::uint32_t r = 0; r < d; ++r) {
            for (std::uint32_t c = 0; c < d; ++c) {
                a[r][c] += f * wj[r] * wj[c];
            }
            rhs[r] += f * target * wj[r];
        }
    }
    // Gauss-Jordan with partial pivoting.
    for (std::uint32_t col = 0; col < d; ++col) {
        std::uint32_t pivot = col;
        for (std::uint32_t r = col + 1; r < d; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        const double diag = a[col][col];
        if (diag == 0.0) continue; // singular; caller avoids these fixtures
        for (std::uint32_t c = col; c < d; ++c) a[col][c] /= diag;
        rhs[col] /= diag;
        for (std::uint32_t r = 0; r < d; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double factor = a[r][col];
            for (std::uint32_t c = col; c < d; ++c) a[r][c] -= factor * a[col][c];
            rhs[r] -= factor * rhs[col];
        }
    }
    return rhs;
}

double gradient_check(const ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg,
                      double step) {
    const CostGradients analytic = example_cost_gradients(params, rec, cfg);
    ModelParams probe = params;
    const std::uint32_t d = params.dim;
    double worst = 0.0;
    auto central = [&](double* coord) {
        const double saved = *coord;
        *coord = saved + step;
        const double up = example_cost(probe, rec, cfg);
        *coord = saved - step;
        const double down = example_cost(probe, rec, cfg);
        *coord = saved;
        return (up - down) / (2.0 * step);
    };
    auto relative = [&](double got, double want) {
        const double scale = std::max({1e-8, std::fabs(got), std::fabs(want)});
        return std::fabs(got - want) / scale;
    };
    for (std::uint32_t k = 0; k < d; ++k) {
        worst = std::max(worst, relative(central(&probe.w[std::size_t(rec.row) * d + k]),
                                         analytic.d_w[k]));
        worst = std::max(worst, relative(central(&probe.wc[std::size_t(rec.col) * d + k]),
                                         analytic.d_wc[k]));
    }
    worst = std::max(worst, relative(central(&probe.b[rec.row]), analytic.d_b));
    worst = std::max(worst, relative(central(&probe.bc[rec.col]), analytic.d_bc));
    return worst;
}

std::int64_t brute_force_analogy(const EmbeddingSet& emb, std::uint32_t ia, std::uint32_t ib,
                                 std::uint32_t ic) {
    const std::uint32_t d = emb.dim();
    auto unit = [&](std::uint32_t idx) {
        auto v = emb.vector(idx);
        std::vector<double> u(v.begin(), v.end());
        double norm = 0.0;
        for (double x : u) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& x : u) x /= norm;
        }
        return u;
    };
    const auto ua = unit(ia);
    const auto ub = unit(ib);
    const auto uc = unit(ic);
    std::vector<double> target(d);
    for (std::uint32_t k = 0; k < d; ++k) target[k] = ub[k] - ua[k] + uc[k];

    std::int64_t best = -1;
    double best_score = -1e300;
    for (std::uint32_t v = 0; v < emb.size(); ++v) {
        if (v == ia || v == ib || v == ic) continue;
        const auto uv = unit(v);
        double s = 0.0;
        for (std::uint32_t k = 0; k < d; ++k) s += uv[k] * target[k];
        if (s > best_score) {
            best_score = s;
            best = v;
        }
    }
    return best;
}

Docs random_corpus(const RandomCorpusSpec& spec) {
    SplitMix64 rng(mix64(spec.seed + 0x51D5ECCAFE15ULL));
    const std::uint64_t total =
        spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
    Docs docs;
    std::uint64_t emitted = 0;
    while (emitted < total) {
        const std::uint64_t len = std::min<std::uint64_t>(
            spec.min_doc + rng.below(spec.max_doc - spec.min_doc + 1), total - emitted);
        std::vector<std::string> doc;
        doc.reserve(len);
        for (std::uint64_t t = 0; t < len; ++t) {
            doc.push_back("w" + std::to_string(rng.below(spec.alphabet)));
        }
        emitted += len;
        docs.push_back(std::move(doc));
    }
    return docs;
}

ModelParams random_params(std::uint64_t vocab, std::uint32_t dim, std::uint64_t seed,
                          double range) {
    ModelParams p = ModelParams::init(vocab, dim, seed);
    SplitMix64 rng(mix64(seed ^ 0xABCD1234ULL));
    auto fill = [&](std::vector<double>& v, double r) {
        for (auto& x : v) x = (rng.unit() * 2.0 - 1.0) * r;
    };
    fill(p.w, range);
    fill(p.wc, range);
    fill(p.b, range);
    fill(p.bc, range);
    auto jitter = [&](std::vector<double>& v) {
        for (auto& x : v) x = 1.0 + rng.unit();
    };
    jitter(p.grad_w);
    jitter(p.grad_wc);
    jitter(p.grad_b);
    jitter(p.grad_bc);
    return p;
}

} // namespace glovekit::testing
