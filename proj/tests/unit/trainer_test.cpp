#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "glovekit/embeddings.hpp"
#include "glovekit/errors.hpp"
#include "glovekit/rng.hpp"
#include "glovekit/shuffle.hpp"
#include "glovekit/trainer.hpp"
#include "glovekit/vocab.hpp"

#include "../support/oracles.hpp"

using namespace glovekit;

namespace {

TrainConfig toy_config(std::uint32_t dim) {
    TrainConfig cfg;
    cfg.dim = dim;
    cfg.eta = 0.05;
    cfg.alpha = 0.75;
    cfg.xmax = 100.0;
    cfg.epochs = 1;
    cfg.seed = 7;
    return cfg;
}

std::vector<CoocRecord> toy_records(const testing::Docs& docs, const Vocabulary& vocab,
                                    std::uint64_t shuffle_seed = 3) {
    MemoryCorpus corpus(docs);
    CoocOptions opts;
    opts.window = 10;
    auto records = build_cooccurrence(corpus, vocab, opts);
    shuffle_records(records, shuffle_seed);
    return records;
}

} // namespace

TEST_CASE("weighting function saturates at xmax and follows the power law below") {
    CHECK(weight(100.0, 0.75, 100.0) == 1.0);
    CHECK(weight(200.0, 0.75, 100.0) == 1.0);
    // independent route: exp(alpha * log(x/xmax))
    CHECK(weight(50.0, 0.75, 100.0) ==
          doctest::Approx(std::exp(0.75 * std::log(0.5))).epsilon(1e-14));
    CHECK(weight(50.0, 0.75, 100.0) == doctest::Approx(0.5946035575013605).epsilon(1e-12));
    CHECK_THROWS_AS(weight(0.0, 0.75, 100.0), ValidationError);
}

TEST_CASE("weighting is monotone non-decreasing") {
    double prev = 0.0;
    for (double x = 0.5; x < 150.0; x += 0.5) {
        const double w = weight(x, 0.75, 100.0);
        CHECK(w >= prev);
        CHECK(w <= 1.0);
        prev = w;
    }
}

TEST_CASE("example cost is zero exactly when the record is fit") {
    ModelParams p = ModelParams::init(2, 4, 1);
    std::fill(p.w.begin(), p.w.end(), 0.0);
    std::fill(p.wc.begin(), p.wc.end(), 0.0);
    std::fill(p.b.begin(), p.b.end(), 0.0);
    std::fill(p.bc.begin(), p.bc.end(), 0.0);
    const TrainConfig cfg = toy_config(4);
    CHECK(example_cost(p, {0, 1, 1.0}, cfg) == 0.0); // log 1 = 0
    const double e = std::exp(1.0);
    CHECK(example_cost(p, {0, 1, e}, cfg) ==
          doctest::Approx(weight(e, cfg.alpha, cfg.xmax)).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    for (std::uint32_t dim : {2u, 50u}) {
        const TrainConfig cfg = toy_config(dim);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto params = testing::random_params(6, dim, 900 + seed);
            SplitMix64 rng(seed);
            const CoocRecord rec{static_cast<std::uint32_t>(rng.below(6)),
                                 static_cast<std::uint32_t>(rng.below(6)),
                                 0.25 + double(rng.below(400))};
            CHECK(testing::gradient_check(params, rec, cfg) < 1e-4);
        }
    }
}

TEST_CASE("a zero-residual record leaves parameters and accumulators untouched") {
    ModelParams p = ModelParams::init(2, 3, 5);
    std::fill(p.w.begin(), p.w.end(), 0.0);
    std::fill(p.wc.begin(), p.wc.end(), 0.0);
    std::fill(p.b.begin(), p.b.end(), 0.0);
    std::fill(p.bc.begin(), p.bc.end(), 0.0);
    const ModelParams before = p;
    const auto result = adagrad_step(p, {0, 1, 1.0}, toy_config(3));
    CHECK(result.cost == 0.0);
    CHECK_FALSE(result.skipped);
    CHECK(std::memcmp(p.w.data(), before.w.data(), p.w.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(p.grad_w.data(), before.grad_w.data(),
                      p.grad_w.size() * sizeof(double)) == 0);
    CHECK(p.b == before.b);
    CHECK(p.grad_b == before.grad_b);
}

TEST_CASE("one-dimensional step matches hand arithmetic with unit accumulators") {
    ModelParams p = ModelParams::init(2, 1, 5);
    p.w = {0.5, 0.0};
    p.wc = {0.0, 0.25};
    p.b = {0.1, 0.0};
    p.bc = {0.0, -0.1};
    TrainConfig cfg = toy_config(1);
    cfg.eta = 0.1;
    cfg.xmax = 10.0;
    const CoocRecord rec{0, 1, 2.0};

    const double r = 0.5 * 0.25 + 0.1 + (-0.1) - std::log(2.0);
    const double f = std::pow(2.0 / 10.0, 0.75);
    const double g = f * r;
    const double want_w = 0.5 - 0.1 * (g * 0.25) / std::sqrt(1.0);
    const double want_wc = 0.25 - 0.1 * (g * 0.5) / std::sqrt(1.0);
    const double want_b = 0.1 - 0.1 * g / std::sqrt(1.0);
    const double want_bc = -0.1 - 0.1 * g / std::sqrt(1.0);

    const auto result = adagrad_step(p, rec, cfg);
    CHECK(result.cost == doctest::Approx(f * r * r).epsilon(1e-15));
    CHECK(p.w[0] == doctest::Approx(want_w).epsilon(1e-15));
    CHECK(p.wc[1] == doctest::Approx(want_wc).epsilon(1e-15));
    CHECK(p.b[0] == doctest::Approx(want_b).epsilon(1e-15));
    CHECK(p.bc[1] == doctest::Approx(want_bc).epsilon(1e-15));
    CHECK(p.grad_w[0] == doctest::Approx(1.0 + (g * 0.25) * (g * 0.25)).epsilon(1e-15));
    CHECK(p.grad_wc[1] == doctest::Approx(1.0 + (g * 0.5) * (g * 0.5)).epsilon(1e-15));
    CHECK(p.grad_b[0] == doctest::Approx(1.0 + g * g).epsilon(1e-15));
    CHECK(p.grad_bc[1] == doctest::Approx(1.0 + g * g).epsilon(1e-15));
}

TEST_CASE("repeated records take shrinking steps") {
    ModelParams p = testing::random_params(3, 8, 42, 0.2);
    const TrainConfig cfg = toy_config(8);
    const CoocRecord rec{0, 1, 5.0};

    const auto w_before1 = std::vector<double>(p.w_row(0).begin(), p.w_row(0).end());
    adagrad_step(p, rec, cfg);
    const auto w_after1 = std::vector<double>(p.w_row(0).begin(), p.w_row(0).end());
    adagrad_step(p, rec, cfg);
    const auto w_after2 = std::vector<double>(p.w_row(0).begin(), p.w_row(0).end());

    double step1 = 0.0, step2 = 0.0;
    for (std::size_t k = 0; k < w_before1.size(); ++k) {
        step1 += std::fabs(w_after1[k] - w_before1[k]);
        step2 += std::fabs(w_after2[k] - w_after1[k]);
    }
    CHECK(step2 < step1);
}

TEST_CASE("a single record is fit to negligible cost") {
    TrainConfig cfg = toy_config(4);
    cfg.epochs = 1000;
    cfg.eta = 0.1;
    MemoryRecordStore store({{0, 1, 7.0}});
    const auto result = train(store, 2, cfg);
    CHECK(result.epoch_mean_cost.front() > result.epoch_mean_cost.back());
    CHECK(result.epoch_mean_cost.back() < 1e-6);
}

TEST_CASE("single-threaded training is bit-reproducible") {
    const auto docs = testing::random_corpus({.seed = 100, .alphabet = 30, .max_tokens = 2000});
    MemoryCorpus corpus(docs);
    const auto vocab = Vocabulary::build(count_tokens(corpus), 1);
    const auto records = toy_records(docs, vocab);
    TrainConfig cfg = toy_config(8);
    cfg.epochs = 3;
    MemoryRecordStore store(records);

    const auto run1 = train(store, vocab.size(), cfg);
    const auto run2 = train(store, vocab.size(), cfg);
    REQUIRE(run1.params.w.size() == run2.params.w.size());
    CHECK(std::memcmp(run1.params.w.data(), run2.params.w.data(),
                      run1.params.w.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(run1.params.bc.data(), run2.params.bc.data(),
                      run1.params.bc.size() * sizeof(double)) == 0);
    CHECK(run1.epoch_mean_cost == run2.epoch_mean_cost);
}

TEST_CASE("a five-word corpus trains to a lower mean cost in 100 epochs") {
    const testing::Docs docs{{"ant", "bee", "cat", "dog", "elk", "ant", "bee", "ant", "cat"},
                             {"dog", "elk", "dog", "ant", "bee", "cat", "ant"},
                             {"elk", "cat", "bee", "dog", "ant", "elk"}};
    MemoryCorpus corpus(docs);
    const auto vocab = Vocabulary::build(count_tokens(corpus), 1);
    REQUIRE(vocab.size() == 5);
    const auto records = toy_records(docs, vocab);
    TrainConfig cfg = toy_config(4);
    cfg.epochs = 100;
    MemoryRecordStore store(records);
    const auto result = train(store, vocab.size(), cfg);
    CHECK(result.epoch_mean_cost.back() < result.epoch_mean_cost.front());
}

TEST_CASE("epoch cost decreases on a small corpus") {
    const auto docs = testing::random_corpus({.seed = 200, .alphabet = 50,
                                              .min_tokens = 8000, .max_tokens = 8000});
    MemoryCorpus corpus(docs);
    const auto vocab = Vocabulary::build(count_tokens(corpus), 1);
    const auto records = toy_records(docs, vocab);
    TrainConfig cfg = toy_config(16);
    cfg.epochs = 5;
    MemoryRecordStore store(records);
    const auto result = train(store, vocab.size(), cfg);
    REQUIRE(result.epoch_mean_cost.size() == 5);
    for (std::size_t e = 1; e < 5; ++e) {
        CHECK(result.epoch_mean_cost[e] < result.epoch_mean_cost[e - 1]);
    }
    CHECK(result.skipped == 0);
}

TEST_CASE("swapping focus and context blocks and transposing records keeps the cost") {
    const TrainConfig cfg = toy_config(6);
    auto params = testing::random_params(10, 6, 77);
    std::vector<CoocRecord> records;
    SplitMix64 rng(123);
    for (int k = 0; k < 200; ++k) {
        records.push_back({static_cast<std::uint32_t>(rng.below(10)),
                           static_cast<std::uint32_t>(rng.below(10)),
                           0.5 + double(rng.below(300))});
    }
    ModelParams swapped = params;
    std::swap(swapped.w, swapped.wc);
    std::swap(swapped.b, swapped.bc);

    double total = 0.0, total_swapped = 0.0;
    for (const auto& rec : records) {
        total += example_cost(params, rec, cfg);
        total_swapped += example_cost(swapped, {rec.col, rec.row, rec.value}, cfg);
    }
    CHECK(total == total_swapped); // bitwise: same multiplications, same order
}

TEST_CASE("multi-threaded training tracks the single-thread cost trajectory") {
    testing::RandomCorpusSpec spec;
    spec.seed = 300;
    spec.alphabet = 50;
    spec.min_tokens = 10000;
    spec.max_tokens = 10000;
    const auto docs = testing::random_corpus(spec);
    MemoryCorpus corpus(docs);
    const auto vocab = Vocabulary::build(count_tokens(corpus), 1);
    const auto records = toy_records(docs, vocab);
    MemoryRecordStore store(records);

    TrainConfig cfg = toy_config(8);
    cfg.epochs = 3;
    const auto serial = train(store, vocab.size(), cfg);
    cfg.threads = 4;
    const auto parallel = train(store, vocab.size(), cfg);
    REQUIRE(serial.epoch_mean_cost.size() == parallel.epoch_mean_cost.size());
    for (std::size_t e = 0; e < serial.epoch_mean_cost.size(); ++e) {
        const double rel = std::fabs(serial.epoch_mean_cost[e] - parallel.epoch_mean_cost[e]) /
                           serial.epoch_mean_cost[e];
        CHECK(rel < 0.01);
    }
}

TEST_CASE("pathological records are skipped and counted, and too many abort") {
    ModelParams p = ModelParams::init(2, 2, 1);
    p.w[0] = 1e308;
    p.wc[2] = 1e308; // dot overflows to inf -> skip
    const auto result = adagrad_step(p, {0, 1, 2.0}, toy_config(2));
    CHECK(result.skipped);

    TrainConfig cfg = toy_config(2);
    cfg.epochs = 1;
    cfg.eta = 1e300; // first step blows the parameters up, second overflows
    MemoryRecordStore store({{0, 1, 2.0}, {0, 1, 2.0}});
    CHECK_THROWS_AS(train(store, 2, cfg), TrainingError);
}

TEST_CASE("training requires a nonempty stream and validates the config") {
    MemoryRecordStore empty({});
    CHECK_THROWS_AS(train(empty, 2, toy_config(2)), ValidationError);
    TrainConfig bad = toy_config(2);
    bad.eta = -0.1;
    MemoryRecordStore store({{0, 1, 1.0}});
    CHECK_THROWS_AS(train(store, 2, bad), ValidationError);
}

TEST_CASE("records outside the vocabulary abort training") {
    MemoryRecordStore store({{5, 1, 1.0}});
    CHECK_THROWS_AS(train(store, 2, toy_config(2)), ValidationError);
}

TEST_CASE("epoch defaults follow the dimension") {
    CHECK(TrainConfig::default_epochs(50) == 50);
    CHECK(TrainConfig::default_epochs(100) == 50);
    CHECK(TrainConfig::default_epochs(200) == 100);
    CHECK(TrainConfig::default_epochs(300) == 100);
    TrainConfig cfg;
    CHECK(cfg.eta == 0.05);
    CHECK(cfg.alpha == 0.75);
    CHECK(cfg.xmax == 100.0);
    CHECK(cfg.seed == 2024);
    cfg.dim = 300;
    CHECK(cfg.effective_epochs() == 100);
    const auto profile = TrainConfig::wiki_giga_50d();
    CHECK(profile.eta == 0.075);
    CHECK(profile.seed == 123);
    CHECK(profile.dim == 50);
    CHECK(profile.effective_epochs() == 50);
}

TEST_CASE("model parameters round-trip through disk bitwise") {
    const auto params = testing::random_params(7, 5, 88);
    const auto path = std::filesystem::temp_directory_path() / "glovekit_params_test.bin";
    params.save(path);
    const auto loaded = ModelParams::load(path);
    CHECK(loaded.dim == params.dim);
    CHECK(loaded.vocab == params.vocab);
    CHECK(loaded.w == params.w);
    CHECK(loaded.grad_bc == params.grad_bc);
    std::filesystem::remove(path);
}

TEST_CASE("export modes compose vectors as documented") {
    ModelParams p = ModelParams::init(2, 2, 9);
    p.w = {1.0, 2.0, 3.0, 4.0};
    p.wc = {1.0, 2.0, 0.5, 0.5};
    const auto vocab = Vocabulary::build({{"hi", 5}, {"yo", 3}}, 1);

    const auto sum = export_embeddings(p, vocab, ExportMode::sum);
    CHECK(sum.dim() == 2);
    // w == wc for word 0, so sum mode doubles it
    const auto v0 = sum.vector(*sum.find("hi"));
    CHECK(v0[0] == 2.0);
    CHECK(v0[1] == 4.0);

    const auto focus = export_embeddings(p, vocab, ExportMode::focus);
    const auto f1 = focus.vector(*focus.find("yo"));
    CHECK(f1[0] == 3.0);
    CHECK(f1[1] == 4.0);

    const auto concat = export_embeddings(p, vocab, ExportMode::concat);
    CHECK(concat.dim() == 4);
    const auto c1 = concat.vector(*concat.find("yo"));
    CHECK(c1[2] == 0.5);
}
