#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "glovekit/errors.hpp"
#include "glovekit/eval.hpp"
#include "glovekit/io_util.hpp"
#include "glovekit/rng.hpp"

#include "../support/oracles.hpp"

using namespace glovekit;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    auto dir = fs::temp_directory_path() / "glovekit_eval_test";
    fs::create_directories(dir);
    return dir;
}

EmbeddingSet make_embedding(const std::vector<std::string>& words,
                            const std::vector<std::vector<double>>& vectors) {
    std::vector<double> matrix;
    for (const auto& v : vectors) matrix.insert(matrix.end(), v.begin(), v.end());
    return EmbeddingSet(words, static_cast<std::uint32_t>(vectors.front().size()),
                        std::move(matrix));
}

EmbeddingSet random_embedding(std::size_t count, std::uint32_t dim, std::uint64_t seed) {
    SplitMix64 rng(mix64(seed));
    std::vector<std::string> words;
    std::vector<double> matrix;
    for (std::size_t i = 0; i < count; ++i) {
        words.push_back("w" + std::to_string(i));
        for (std::uint32_t k = 0; k < dim; ++k) matrix.push_back(rng.unit() * 2.0 - 1.0);
    }
    return EmbeddingSet(std::move(words), dim, std::move(matrix));
}

} // namespace

TEST_CASE("an exactly constructed analogy is answered correctly") {
    const double s = 1.0 / std::sqrt(3.0);
    const auto emb = make_embedding({"a", "b", "c", "gold"},
                                    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-s, s, s}});
    std::vector<AnalogyQuestion> questions{{"a", "b", "c", "gold"}};
    const auto report = analogy_eval(emb, questions);
    CHECK(report.value == 1.0);
    CHECK(report.answered == 1);
    CHECK(report.skipped == 0);
}

TEST_CASE("questions with out-of-vocabulary words are skipped, not answered") {
    const auto emb = random_embedding(5, 4, 1);
    std::vector<AnalogyQuestion> questions{{"w0", "w1", "w2", "w3"},
                                           {"w0", "missing", "w2", "w3"}};
    const auto report = analogy_eval(emb, questions);
    CHECK(report.answered + report.skipped == questions.size());
    CHECK(report.skipped == 1);
}

TEST_CASE("gold equal to an excluded query word is unreachable and counted wrong") {
    // w_a == w_b makes the target c's own vector; c is excluded by rule
    const auto emb = make_embedding({"a", "b", "c", "other"},
                                    {{1, 0}, {1, 0}, {0, 1}, {0.6, 0.8}});
    std::vector<AnalogyQuestion> questions{{"a", "b", "c", "c"}};
    const auto report = analogy_eval(emb, questions);
    CHECK(report.answered == 1);
    CHECK(report.value == 0.0);
}

TEST_CASE("evaluator refuses an empty embedding") {
    EmbeddingSet empty;
    CHECK_THROWS_AS(Evaluator{empty}, ValidationError);
}

TEST_CASE("analogy argmax agrees with the exhaustive reference scan") {
    const auto emb = random_embedding(200, 8, 99);
    Evaluator evaluator(emb, 2);
    SplitMix64 rng(5);
    std::size_t checked = 0;
    for (int q = 0; q < 50; ++q) {
        const auto ia = static_cast<std::uint32_t>(rng.below(emb.size()));
        const auto ib = static_cast<std::uint32_t>(rng.below(emb.size()));
        const auto ic = static_cast<std::uint32_t>(rng.below(emb.size()));
        const auto expected = testing::brute_force_analogy(emb, ia, ib, ic);
        if (expected < 0) continue;
        std::vector<AnalogyQuestion> one{{emb.word(ia), emb.word(ib), emb.word(ic),
                                          emb.word(static_cast<std::uint32_t>(expected))}};
        const auto report = evaluator.analogy("probe", one);
        REQUIRE(report.answered == 1);
        CHECK_MESSAGE(report.value == 1.0, "question ", q, ": evaluator prediction '",
                      report.items[0].predicted, "' != reference '",
                      emb.word(static_cast<std::uint32_t>(expected)), "'");
        ++checked;
    }
    CHECK(checked >= 40);
}

TEST_CASE("analogy answers are invariant under uniform positive scaling") {
    const auto emb = random_embedding(60, 6, 7);
    std::vector<double> scaled_matrix;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        for (double x : emb.vector(static_cast<std::uint32_t>(i))) {
            scaled_matrix.push_back(3.7 * x);
        }
    }
    const EmbeddingSet scaled(emb.words(), emb.dim(), std::move(scaled_matrix));

    std::vector<AnalogyQuestion> questions;
    SplitMix64 rng(17);
    for (int q = 0; q < 30; ++q) {
        questions.push_back({emb.word(static_cast<std::uint32_t>(rng.below(emb.size()))),
                             emb.word(static_cast<std::uint32_t>(rng.below(emb.size()))),
                             emb.word(static_cast<std::uint32_t>(rng.below(emb.size()))),
                             emb.word(0)});
    }
    const auto r1 = analogy_eval(emb, questions);
    const auto r2 = analogy_eval(scaled, questions);
    REQUIRE(r1.items.size() == r2.items.size());
    for (std::size_t k = 0; k < r1.items.size(); ++k) {
        CHECK(r1.items[k].predicted == r2.items[k].predicted);
    }
}

TEST_CASE("dataset and vocabulary are case-folded before lookup") {
    const auto emb = make_embedding({"paris", "france"}, {{1, 0}, {0, 1}});
    Evaluator evaluator(emb, 1);
    CHECK(evaluator.lookup("Paris").has_value());
    CHECK(evaluator.lookup("FRANCE").has_value());
    CHECK_FALSE(evaluator.lookup("berlin").has_value());
}

TEST_CASE("similarity rho is exactly one for monotone scores and minus one reversed") {
    // embedding with controllable pairwise cosines: 2d unit vectors
    std::vector<std::string> words;
    std::vector<std::vector<double>> vecs;
    const int n = 6;
    for (int i = 0; i < n; ++i) {
        const double angle = 0.2 * i;
        words.push_back("p" + std::to_string(i));
        vecs.push_back({std::cos(angle), std::sin(angle)});
    }
    const auto emb = make_embedding(words, vecs);
    // pair (p0, pi): cosine = cos(0.2 i), strictly decreasing in i
    std::vector<SimilarityPair> monotone;
    std::vector<SimilarityPair> reversed;
    for (int i = 1; i < n; ++i) {
        const double human = 10.0 - i; // decreasing, like the cosines
        monotone.push_back({"p0", words[static_cast<std::size_t>(i)], human});
        reversed.push_back({"p0", words[static_cast<std::size_t>(i)], -human});
    }
    CHECK(similarity_eval(emb, monotone).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_eval(emb, reversed).value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("spearman handles ties with average ranks, matching a hand computation") {
    // model [1, 2, 3, 3, 5] -> ranks [1, 2, 3.5, 3.5, 5]
    // human [10, 20, 30, 40, 50] -> ranks [1..5]; rho = sqrt(0.95)
    const std::vector<double> model{1.0, 2.0, 3.0, 3.0, 5.0};
    const std::vector<double> human{10.0, 20.0, 30.0, 40.0, 50.0};
    CHECK(spearman_rho(model, human) ==
          doctest::Approx(std::sqrt(0.95)).epsilon(1e-12));
    const auto ranks = average_ranks(model);
    CHECK(ranks == std::vector<double>{1.0, 2.0, 3.5, 3.5, 5.0});
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
    SplitMix64 rng(88);
    std::vector<double> a, b;
    for (int i = 0; i < 40; ++i) {
        a.push_back(rng.unit() * 10.0 - 5.0);
        b.push_back(rng.unit() * 10.0 - 5.0);
    }
    std::vector<double> a_transformed;
    for (double x : a) a_transformed.push_back(x * x * x + 2.0 * x + 1.0); // strictly increasing
    CHECK(spearman_rho(a, b) == spearman_rho(a_transformed, b));
}

TEST_CASE("fewer than two answered pairs is an error") {
    const auto emb = random_embedding(3, 4, 3);
    std::vector<SimilarityPair> pairs{{"w0", "missing", 1.0}, {"w1", "w2", 2.0}};
    CHECK_THROWS_AS(similarity_eval(emb, pairs), ValidationError);
}

TEST_CASE("oov pairs are skipped and counted") {
    const auto emb = random_embedding(4, 4, 4);
    std::vector<SimilarityPair> pairs{
        {"w0", "w1", 1.0}, {"w0", "gone", 2.0}, {"w2", "w3", 3.0}, {"w1", "w3", 0.5}};
    const auto report = similarity_eval(emb, pairs);
    CHECK(report.answered == 3);
    CHECK(report.skipped == 1);
    CHECK(report.answered + report.skipped == pairs.size());
}

TEST_CASE("lexicon diff subtracts the old vocabulary") {
    const auto new_vocab = Vocabulary::build({{"covid", 5}, {"cat", 9}}, 1);
    const auto old_vocab = Vocabulary::build({{"cat", 4}}, 1);
    CHECK(lexicon_diff(new_vocab, old_vocab) == std::vector<std::string>{"covid"});
}

TEST_CASE("diff filters digits and non-Latin letters under the strict reading") {
    const auto new_vocab = Vocabulary::build({{"covid19", 9},
                                              {"tiktok", 8},
                                              {"blockchain", 7},
                                              {"caf\xC3\xA9", 6},   // é (Latin-1 letter)
                                              {"\xD0\xBC\xD0\xB8\xD1\x80", 5}, // Cyrillic
                                              {"covid", 4},
                                              {"e-mail", 3}},
                                             1);
    const auto old_vocab = Vocabulary::build({{"unrelated", 2}}, 1);
    const auto words = lexicon_diff(new_vocab, old_vocab);
    CHECK(words == std::vector<std::string>{"blockchain", "covid", "e-mail", "tiktok"});

    DiffOptions keep_all;
    keep_all.exclude_digit_words = false;
    keep_all.exclude_nonlatin_words = false;
    CHECK(lexicon_diff(new_vocab, old_vocab, keep_all).size() == 7);
}

TEST_CASE("diff of a vocabulary with itself is empty and growth is anti-monotone") {
    const auto docs = testing::random_corpus({.seed = 15, .alphabet = 40, .max_tokens = 1200});
    MemoryCorpus corpus(docs);
    const auto counts = count_tokens(corpus);
    const auto new_vocab = Vocabulary::build(counts, 1);
    const auto old_small = Vocabulary::build(counts, 6);
    const auto old_large = Vocabulary::build(counts, 3); // superset of old_small
    CHECK(lexicon_diff(new_vocab, new_vocab).empty());
    // growing the old vocabulary never adds output words
    const auto against_large = lexicon_diff(new_vocab, old_large);
    const auto against_small = lexicon_diff(new_vocab, old_small);
    for (const auto& w : against_large) {
        CHECK(std::find(against_small.begin(), against_small.end(), w) != against_small.end());
    }
    CHECK(against_large.size() <= against_small.size());
}

TEST_CASE("nearest neighbors: only candidate, duplicates first, reference scan") {
    const auto two = make_embedding({"a", "b"}, {{1, 0}, {0.6, 0.8}});
    const auto nn = nearest_neighbors(two, "a", 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].first == "b");

    const auto dup = make_embedding({"q", "copy", "far"}, {{1, 0}, {2, 0}, {0, 1}});
    const auto nn2 = nearest_neighbors(dup, "q", 2);
    CHECK(nn2[0].first == "copy");
    CHECK(nn2[0].second == doctest::Approx(1.0).epsilon(1e-12));

    const auto emb = random_embedding(5, 3, 6);
    const auto got = nearest_neighbors(emb, "w2", 4);
    // exhaustive reference
    std::vector<std::pair<double, std::string>> scores;
    const auto qi = *emb.find("w2");
    Evaluator ev(emb, 1);
    for (std::uint32_t v = 0; v < emb.size(); ++v) {
        if (v == qi) continue;
        double s = 0.0;
        const auto uq = ev.unit_vector(qi);
        const auto uv = ev.unit_vector(v);
        for (std::uint32_t k = 0; k < emb.dim(); ++k) s += uq[k] * uv[k];
        scores.emplace_back(s, emb.word(v));
    }
    std::sort(scores.begin(), scores.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    REQUIRE(got.size() == 4);
    for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].first == scores[k].second);
    }

    CHECK_THROWS_AS(nearest_neighbors(emb, "absent", 1), ValidationError);
}

TEST_CASE("analogy files parse the section-header format") {
    const auto path = test_dir() / "analogy.txt";
    std::ofstream(path) << ": capital-common\nathens greece baghdad iraq\n"
                           ": family\nboy girl brother sister\n";
    const auto questions = load_analogy_file(path);
    REQUIRE(questions.size() == 2);
    CHECK(questions[0].a == "athens");
    CHECK(questions[1].gold == "sister");

    std::ofstream(test_dir() / "bad.txt") << "only three words\n";
    CHECK_THROWS_AS(load_analogy_file(test_dir() / "bad.txt"), ParseError);
}

TEST_CASE("similarity files sniff their delimiter") {
    const auto ws = test_dir() / "ws.txt";
    std::ofstream(ws) << "gem\tjewel\t8.96\ncoast\tshore\t9.1\n";
    auto pairs = load_similarity_file(ws);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].w1 == "gem");
    CHECK(pairs[1].human_score == doctest::Approx(9.1));

    const auto csv = test_dir() / "sim.csv";
    std::ofstream(csv) << "word1,word2,score\nold,new,1.5\n";
    SimilarityFormat fmt;
    fmt.skip_header = true;
    pairs = load_similarity_file(csv, fmt);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].w2 == "new");
}

TEST_CASE("per-item reports list every outcome") {
    const auto emb = random_embedding(6, 4, 11);
    std::vector<AnalogyQuestion> questions{{"w0", "w1", "w2", "w3"},
                                           {"w0", "nope", "w2", "w3"}};
    const auto report = analogy_eval(emb, questions);
    const auto path = test_dir() / "report.tsv";
    write_report_tsv(report, questions, {}, path);
    const auto text = read_text_file(path);
    CHECK(text.find("skipped_oov") != std::string::npos);
    CHECK(text.find("# answered\t1") != std::string::npos);
}
