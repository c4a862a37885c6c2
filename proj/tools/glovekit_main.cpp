// Command-line front end: one subcommand per pipeline operation plus a
// `run` orchestrator driven by a JSON config.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error,
//             3 incomplete-resume conflict.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glovekit/cooccur.hpp"
#include "glovekit/diagnostics.hpp"
#include "glovekit/digest.hpp"
#include "glovekit/embeddings.hpp"
#include "glovekit/errors.hpp"
#include "glovekit/eval.hpp"
#include "glovekit/pipeline.hpp"
#include "glovekit/rng.hpp"
#include "glovekit/shuffle.hpp"
#include "glovekit/trainer.hpp"
#include "glovekit/version.hpp"
#include "glovekit/vocab.hpp"

namespace gk = glovekit;

namespace {

int run_vocab(const std::string& manifest_path, const std::string& output,
              std::uint64_t mft, std::optional<std::uint64_t> max_size,
              const std::vector<std::string>& count_files, const std::string& counts_out) {
    gk::Vocabulary vocab;
    if (!count_files.empty()) {
        std::vector<gk::CountTable> parts;
        parts.reserve(count_files.size());
        for (const auto& f : count_files) parts.push_back(gk::load_count_table(f));
        vocab = gk::Vocabulary::merge(parts, mft, max_size);
    } else {
        gk::TokenStream stream(gk::CorpusManifest::load(manifest_path));
        auto counts = gk::count_tokens(stream);
        if (!counts_out.empty()) gk::save_count_table(counts, counts_out);
        vocab = gk::Vocabulary::build(counts, mft, max_size);
    }
    vocab.save(output);
    std::fprintf(stderr, "vocab: %zu words -> %s\n", vocab.size(), output.c_str());
    return 0;
}

int run_cooccur(const std::string& manifest_path, const std::string& vocab_path,
                const std::string& output, std::uint32_t window, const std::string& weighting,
                std::size_t memory_mb, const std::vector<std::string>& merge_parts,
                const std::vector<std::string>& merge_vocabs) {
    gk::CoocOptions opts;
    opts.window = window;
    opts.weighting = gk::weighting_from_name(weighting);
    opts.memory_budget_bytes = memory_mb << 20;
    const gk::Vocabulary vocab = gk::Vocabulary::load(vocab_path);

    gk::CoocMeta meta;
    if (!merge_parts.empty()) {
        if (merge_parts.size() != merge_vocabs.size()) {
            throw gk::ValidationError("--merge-part and --merge-vocab must be paired");
        }
        std::vector<std::filesystem::path> parts(merge_parts.begin(), merge_parts.end());
        std::vector<std::vector<std::int64_t>> remaps;
        remaps.reserve(parts.size());
        for (const auto& vp : merge_vocabs) {
            remaps.push_back(gk::remap_from_vocabs(gk::Vocabulary::load(vp), vocab));
        }
        meta = gk::merge_cooccurrence_files(parts, remaps, vocab.size(), opts, output,
                                            gk::vocabulary_digest(vocab));
    } else {
        if (manifest_path.empty()) {
            throw gk::ValidationError("either --manifest or --merge-part inputs are required");
        }
        gk::TokenStream stream(gk::CorpusManifest::load(manifest_path));
        meta = gk::build_cooccurrence_file(stream, vocab, opts, output);
    }
    std::fprintf(stderr, "cooccur: %llu records, value sum %.6f -> %s\n",
                 static_cast<unsigned long long>(meta.records), meta.value_sum, output.c_str());
    return 0;
}

int run_shuffle(const std::string& input, const std::string& output, std::uint64_t seed,
                std::size_t memory_mb, const std::string& temp_dir) {
    gk::ShuffleOptions opts;
    opts.seed = seed;
    opts.memory_budget_bytes = memory_mb << 20;
    if (!temp_dir.empty()) opts.temp_dir = temp_dir;
    const auto meta = gk::shuffle_file(input, output, opts);
    std::fprintf(stderr, "shuffle: %llu records, seed %llu -> %s\n",
                 static_cast<unsigned long long>(meta.records),
                 static_cast<unsigned long long>(seed), output.c_str());
    return 0;
}

int run_train(const std::string& input, const std::string& vocab_path,
              const gk::TrainConfig& cfg, const std::string& params_out,
              const std::string& cost_log) {
    const gk::Vocabulary vocab = gk::Vocabulary::load(vocab_path);
    gk::FileRecordStore store(input);
    const gk::TrainResult result = gk::train(store, vocab.size(), cfg);
    result.params.save(params_out);
    if (!cost_log.empty()) {
        std::ofstream out(cost_log, std::ios::binary);
        out << "epoch\tmean_cost\n";
        for (std::size_t e = 0; e < result.epoch_mean_cost.size(); ++e) {
            out << (e + 1) << '\t' << result.epoch_mean_cost[e] << '\n';
        }
    }
    for (std::size_t e = 0; e < result.epoch_mean_cost.size(); ++e) {
        std::fprintf(stderr, "epoch %zu: mean cost %.6f\n", e + 1, result.epoch_mean_cost[e]);
    }
    if (result.skipped > 0) {
        std::fprintf(stderr, "skipped %llu records\n",
                     static_cast<unsigned long long>(result.skipped));
    }
    return 0;
}

int run_export(const std::string& params_path, const std::string& vocab_path,
               const std::string& mode, const std::string& output, int precision,
               const std::string& binary_out) {
    const auto params = gk::ModelParams::load(params_path);
    const auto vocab = gk::Vocabulary::load(vocab_path);
    const auto emb = gk::export_embeddings(params, vocab, gk::export_mode_from_name(mode));
    emb.save_text(output, precision);
    if (!binary_out.empty()) emb.save_binary(binary_out);
    std::fprintf(stderr, "export: %zu vectors of dimension %u -> %s\n", emb.size(), emb.dim(),
                 output.c_str());
    return 0;
}

int run_eval(const std::string& vectors_path, const std::vector<std::string>& analogy,
             const std::vector<std::string>& similarity, bool skip_header,
             const std::string& report_dir, std::uint32_t threads) {
    const auto emb = gk::EmbeddingSet::load_text(vectors_path);
    gk::Evaluator evaluator(emb, threads);
    auto name_of = [](const std::string& spec, std::string& path) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            path = spec;
            return std::filesystem::path(spec).stem().string();
        }
        path = spec.substr(eq + 1);
        return spec.substr(0, eq);
    };
    for (const auto& spec : analogy) {
        std::string path;
        const auto name = name_of(spec, path);
        const auto questions = gk::load_analogy_file(path);
        const auto report = evaluator.analogy(name, questions);
        std::printf("%s\taccuracy\t%.6f\tanswered\t%llu\tskipped\t%llu\n", name.c_str(),
                    report.value, static_cast<unsigned long long>(report.answered),
                    static_cast<unsigned long long>(report.skipped));
        if (!report_dir.empty()) {
            gk::write_report_tsv(report, questions, {},
                                 std::filesystem::path(report_dir) / ("eval_" + name + ".tsv"));
        }
    }
    for (const auto& spec : similarity) {
        std::string path;
        const auto name = name_of(spec, path);
        gk::SimilarityFormat fmt;
        fmt.skip_header = skip_header;
        const auto pairs = gk::load_similarity_file(path, fmt);
        const auto report = evaluator.similarity(name, pairs);
        std::printf("%s\tspearman_rho\t%.6f\tanswered\t%llu\tskipped\t%llu\n", name.c_str(),
                    report.value, static_cast<unsigned long long>(report.answered),
                    static_cast<unsigned long long>(report.skipped));
        if (!report_dir.empty()) {
            gk::write_report_tsv(report, {}, pairs,
                                 std::filesystem::path(report_dir) / ("eval_" + name + ".tsv"));
        }
    }
    return 0;
}

int run_diff(const std::string& new_vocab, const std::string& old_vocab,
             const std::string& output, bool keep_digits, bool keep_nonlatin) {
    gk::DiffOptions opts;
    opts.exclude_digit_words = !keep_digits;
    opts.exclude_nonlatin_words = !keep_nonlatin;
    const auto words = gk::lexicon_diff(gk::Vocabulary::load(new_vocab),
                                        gk::Vocabulary::load(old_vocab), opts);
    if (output.empty()) {
        for (const auto& w : words) std::printf("%s\n", w.c_str());
    } else {
        std::ofstream out(output, std::ios::binary);
        for (const auto& w : words) out << w << '\n';
        if (!out) throw gk::IoError("write failed for '" + output + "'");
    }
    std::fprintf(stderr, "diff: %zu new words\n", words.size());
    return 0;
}

int run_wls(const std::string& params_path, const std::string& vocab_path,
            const std::string& cooc_path, const std::vector<std::string>& words,
            std::uint64_t sample, std::uint64_t seed, const std::string& output,
            double alpha, double xmax) {
    const auto params = gk::ModelParams::load(params_path);
    const auto vocab = gk::Vocabulary::load(vocab_path);
    gk::TrainConfig cfg;
    cfg.dim = params.dim;
    cfg.alpha = alpha;
    cfg.xmax = xmax;

    if (!words.empty()) {
        const auto records = gk::read_all_records(cooc_path);
        for (const auto& w : words) {
            const auto idx = vocab.find(w);
            if (!idx) throw gk::ValidationError("word '" + w + "' not in vocabulary");
            const auto row = gk::row_of(records, *idx);
            const auto r = gk::wls_vector(*idx, params, row, cfg);
            std::printf("%s\tsupport\t%llu\tcosine\t%s\tobjective_wls\t%.8g\t"
                        "objective_trained\t%.8g\n",
                        w.c_str(), static_cast<unsigned long long>(r.support),
                        r.cosine_defined ? std::to_string(r.cosine).c_str() : "nan",
                        r.objective_wls, r.objective_trained);
        }
        return 0;
    }
    // Sampled table over the whole matrix; streamed through run_pipeline's
    // stage would require a workdir, so reuse the library call directly.
    const auto records = gk::read_all_records(cooc_path);
    std::vector<std::uint32_t> eligible;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].row == records[i].row) ++j;
        if (j - i >= cfg.dim) eligible.push_back(records[i].row);
        i = j;
    }
    if (eligible.size() > sample) {
        auto rng = gk::substream(seed, gk::RngStage::sampling, 0);
        gk::fisher_yates(std::span<std::uint32_t>(eligible), rng);
        eligible.resize(static_cast<std::size_t>(sample));
        std::sort(eligible.begin(), eligible.end());
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw gk::IoError("cannot write '" + output + "'");
    out << "word\tsupport\tcosine\tobjective_wls\tobjective_trained\trank_deficient\n";
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto w : eligible) {
        const auto row = gk::row_of(records, w);
        const auto r = gk::wls_vector(w, params, row, cfg);
        out << vocab.word(w) << '\t' << r.support << '\t';
        if (r.cosine_defined) {
            out << r.cosine;
            sum += r.cosine;
            ++n;
        } else {
            out << "nan";
        }
        out << '\t' << r.objective_wls << '\t' << r.objective_trained << '\t'
            << (r.rank_deficient ? 1 : 0) << '\n';
    }
    if (n > 0) out << "# mean_cosine\t" << sum / double(n) << "\n";
    std::fprintf(stderr, "wls: %llu words scored -> %s\n", static_cast<unsigned long long>(n),
                 output.c_str());
    return 0;
}

int run_mft(const std::string& manifest_path, const std::vector<std::uint64_t>& candidates,
            const gk::TrainConfig& cfg, const gk::MftOptions& opts, const std::string& output) {
    gk::TokenStream stream(gk::CorpusManifest::load(manifest_path));
    const auto result = gk::mft_selection(stream, candidates, cfg, opts);
    gk::write_mft_table(result, output);
    for (const auto& s : result.table) {
        if (s.excluded) {
            std::printf("mft %llu\texcluded\t%s\n", static_cast<unsigned long long>(s.mft),
                        s.note.c_str());
        } else {
            std::printf("mft %llu\tvocab %llu\tmean_cosine %.6f\tsample %llu\n",
                        static_cast<unsigned long long>(s.mft),
                        static_cast<unsigned long long>(s.vocab_size), s.mean_cosine,
                        static_cast<unsigned long long>(s.sample_size));
        }
    }
    if (result.chosen) {
        std::printf("chosen mft\t%llu\n", static_cast<unsigned long long>(*result.chosen));
    } else {
        std::fprintf(stderr, "no candidate produced a usable vocabulary\n");
        return 2;
    }
    return 0;
}

int run_neighbors(const std::string& vectors_path, const std::string& word, std::size_t k) {
    const auto emb = gk::EmbeddingSet::load_text(vectors_path);
    for (const auto& [w, cos] : gk::nearest_neighbors(emb, word, k)) {
        std::printf("%s\t%.6f\n", w.c_str(), cos);
    }
    return 0;
}

int run_run(const std::string& config, const std::string& workdir, std::uint32_t threads,
            std::optional<std::uint64_t> seed, bool force) {
    gk::PipelineOverrides overrides;
    if (!workdir.empty()) overrides.workdir = workdir;
    if (threads > 0) overrides.threads = threads;
    overrides.seed = seed;
    overrides.force = force;
    const auto result = gk::run_pipeline(config, overrides);
    for (const auto& s : result.stages) {
        std::printf("%-8s %s (%.2fs)\n", s.name.c_str(),
                    s.cache_hit ? "skipped (up to date)" : "done", s.seconds);
    }
    std::printf("manifest: %s\n", result.manifest_path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GloVe embedding pipeline: vocabulary, cooccurrences, shuffling, "
                 "AdaGrad training, export, evaluation and WLS diagnostics"};
    app.set_version_flag("--version", gk::kGlovekitVersion);
    app.require_subcommand(1);

    // vocab
    auto* vocab_cmd = app.add_subcommand("vocab", "Count tokens and build a vocabulary");
    std::string v_manifest, v_output = "vocab.txt", v_counts_out;
    std::uint64_t v_mft = 1;
    std::optional<std::uint64_t> v_max;
    std::vector<std::string> v_merge;
    vocab_cmd->add_option("--manifest", v_manifest, "Corpus manifest file");
    vocab_cmd->add_option("--output", v_output, "Vocabulary output path")->required();
    vocab_cmd->add_option("--mft", v_mft, "Minimum frequency threshold (default 1)");
    vocab_cmd->add_option("--max-size", v_max, "Keep only the most frequent N words");
    vocab_cmd->add_option("--counts-out", v_counts_out, "Also dump the raw count table");
    vocab_cmd->add_option("--from-counts", v_merge,
                          "Merge these count tables instead of reading a corpus");

    // cooccur
    auto* cooccur_cmd = app.add_subcommand("cooccur", "Build or merge cooccurrence matrices");
    std::string c_manifest, c_vocab, c_output = "cooccurrence.bin", c_weighting = "harmonic";
    std::uint32_t c_window = 10;
    std::size_t c_memory = 256;
    std::vector<std::string> c_merge_parts, c_merge_vocabs;
    cooccur_cmd->add_option("--manifest", c_manifest, "Corpus manifest file");
    cooccur_cmd->add_option("--vocab", c_vocab, "Vocabulary file (merged vocab when merging)")
        ->required();
    cooccur_cmd->add_option("--output", c_output, "Output records path")->required();
    cooccur_cmd->add_option("--window", c_window, "Symmetric window size (default 10)");
    cooccur_cmd->add_option("--weighting", c_weighting, "harmonic|uniform (default harmonic)");
    cooccur_cmd->add_option("--memory-mb", c_memory, "Accumulator budget in MiB");
    cooccur_cmd->add_option("--merge-part", c_merge_parts, "Part record files to merge");
    cooccur_cmd->add_option("--merge-vocab", c_merge_vocabs,
                            "Vocabulary of each part, same order as --merge-part");

    // shuffle
    auto* shuffle_cmd = app.add_subcommand("shuffle", "Deterministically shuffle records");
    std::string s_input, s_output, s_temp;
    std::uint64_t s_seed = 123;
    std::size_t s_memory = 256;
    shuffle_cmd->add_option("--input", s_input, "Input records")->required();
    shuffle_cmd->add_option("--output", s_output, "Output records")->required();
    shuffle_cmd->add_option("--seed", s_seed, "Shuffle seed (default 123)");
    shuffle_cmd->add_option("--memory-mb", s_memory, "Chunk budget in MiB");
    shuffle_cmd->add_option("--temp-dir", s_temp, "Directory for bucket files");

    // train
    auto* train_cmd = app.add_subcommand("train", "AdaGrad training over a record stream");
    std::string t_input, t_vocab, t_params = "params.bin", t_costs;
    gk::TrainConfig t_cfg;
    bool t_profile_50d = false;
    train_cmd->add_option("--input", t_input, "Shuffled records")->required();
    train_cmd->add_option("--vocab", t_vocab, "Vocabulary file")->required();
    train_cmd->add_option("--output-params", t_params, "Model parameter output")->required();
    train_cmd->add_option("--cost-log", t_costs, "Per-epoch mean cost TSV");
    train_cmd->add_option("--dim", t_cfg.dim, "Vector dimension (default 50)");
    train_cmd->add_option("--eta", t_cfg.eta, "Learning rate (default 0.05)");
    train_cmd->add_option("--alpha", t_cfg.alpha, "Weighting exponent (default 0.75)");
    train_cmd->add_option("--xmax", t_cfg.xmax, "Weighting cutoff (default 100)");
    train_cmd->add_option("--epochs", t_cfg.epochs,
                          "Training epochs (default: 50 below 200d, else 100)");
    train_cmd->add_option("--seed", t_cfg.seed, "Init seed (default 2024)");
    train_cmd->add_option("--threads", t_cfg.threads, "Worker threads (default 1)");
    train_cmd->add_flag("--wiki-giga-50d", t_profile_50d,
                        "Use the 50d profile: eta 0.075, seed 123");

    // export
    auto* export_cmd = app.add_subcommand("export", "Export embeddings from trained parameters");
    std::string e_params, e_vocab, e_mode = "sum", e_output = "vectors.txt", e_binary;
    int e_precision = 6;
    export_cmd->add_option("--params", e_params, "Trained parameter file")->required();
    export_cmd->add_option("--vocab", e_vocab, "Vocabulary file")->required();
    export_cmd->add_option("--mode", e_mode, "sum|focus|concat (default sum)");
    export_cmd->add_option("--output", e_output, "Text vectors output")->required();
    export_cmd->add_option("--precision", e_precision, "Significant digits (default 6)");
    export_cmd->add_option("--binary", e_binary, "Also write full-precision binary vectors");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Analogy and similarity evaluation");
    std::string ev_vectors, ev_report_dir;
    std::vector<std::string> ev_analogy, ev_similarity;
    bool ev_skip_header = false;
    std::uint32_t ev_threads = 0;
    eval_cmd->add_option("--vectors", ev_vectors, "Text vectors file")->required();
    eval_cmd->add_option("--analogy", ev_analogy, "Analogy dataset(s), name=path or path");
    eval_cmd->add_option("--similarity", ev_similarity,
                         "Similarity dataset(s), name=path or path");
    eval_cmd->add_flag("--skip-header", ev_skip_header, "Similarity files have a header line");
    eval_cmd->add_option("--report-dir", ev_report_dir, "Write per-item TSV reports here");
    eval_cmd->add_option("--threads", ev_threads, "Evaluation threads (default: all cores)");

    // diff
    auto* diff_cmd = app.add_subcommand("diff", "New-vocabulary lexicon diff");
    std::string d_new, d_old, d_output;
    bool d_keep_digits = false, d_keep_nonlatin = false;
    diff_cmd->add_option("--new", d_new, "Newer vocabulary file")->required();
    diff_cmd->add_option("--old", d_old, "Older vocabulary file")->required();
    diff_cmd->add_option("--output", d_output, "Output word list (default: stdout)");
    diff_cmd->add_flag("--keep-digits", d_keep_digits, "Keep words containing digits");
    diff_cmd->add_flag("--keep-nonlatin", d_keep_nonlatin,
                       "Keep words with non-Latin letters");

    // wls
    auto* wls_cmd = app.add_subcommand("wls", "Weighted least squares diagnostic vectors");
    std::string w_params, w_vocab, w_cooc, w_output = "wls_table.tsv";
    std::vector<std::string> w_words;
    std::uint64_t w_sample = 200, w_seed = 7;
    double w_alpha = 0.75, w_xmax = 100.0;
    wls_cmd->add_option("--params", w_params, "Trained parameter file")->required();
    wls_cmd->add_option("--vocab", w_vocab, "Vocabulary file")->required();
    wls_cmd->add_option("--cooccur", w_cooc, "Aggregated cooccurrence records")->required();
    wls_cmd->add_option("--word", w_words, "Score only these words (repeatable)");
    wls_cmd->add_option("--sample", w_sample, "Words in the sampled table (default 200)");
    wls_cmd->add_option("--seed", w_seed, "Sampling seed (default 7)");
    wls_cmd->add_option("--output", w_output, "Output table path");
    wls_cmd->add_option("--alpha", w_alpha, "Weighting exponent (default 0.75)");
    wls_cmd->add_option("--xmax", w_xmax, "Weighting cutoff (default 100)");

    // mft
    auto* mft_cmd = app.add_subcommand("mft", "Select a minimum frequency threshold");
    std::string m_manifest, m_output = "mft_table.tsv";
    std::vector<std::uint64_t> m_candidates;
    gk::TrainConfig m_cfg;
    m_cfg.dim = 16;
    m_cfg.epochs = 10;
    gk::MftOptions m_opts;
    mft_cmd->add_option("--manifest", m_manifest, "Corpus manifest file")->required();
    mft_cmd->add_option("--candidates", m_candidates, "Candidate thresholds (>= 2)")
        ->required();
    mft_cmd->add_option("--output", m_output, "Score table output");
    mft_cmd->add_option("--dim", m_cfg.dim, "Probe dimension (default 16)");
    mft_cmd->add_option("--epochs", m_cfg.epochs, "Probe epochs (default 10)");
    mft_cmd->add_option("--eta", m_cfg.eta, "Learning rate");
    mft_cmd->add_option("--seed", m_cfg.seed, "Training seed");
    mft_cmd->add_option("--window", m_opts.window, "Cooccurrence window (default 10)");
    mft_cmd->add_option("--sample", m_opts.sample_size, "Cosine sample size (default 200)");
    mft_cmd->add_option("--threads", m_cfg.threads, "Training threads");

    // neighbors
    auto* nn_cmd = app.add_subcommand("neighbors", "Nearest neighbors by cosine");
    std::string n_vectors, n_word;
    std::size_t n_k = 10;
    nn_cmd->add_option("--vectors", n_vectors, "Text vectors file")->required();
    nn_cmd->add_option("--word", n_word, "Query word")->required();
    nn_cmd->add_option("-k,--top", n_k, "Neighbor count (default 10)");

    // run
    auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline from a JSON config");
    std::string r_config, r_workdir;
    std::uint32_t r_threads = 0;
    std::optional<std::uint64_t> r_seed;
    bool r_force = false;
    run_cmd->add_option("--config", r_config, "Pipeline config JSON")->required();
    run_cmd->add_option("--workdir", r_workdir, "Override the working directory");
    run_cmd->add_option("--threads", r_threads, "Override train/eval thread counts");
    run_cmd->add_option("--seed", r_seed, "Override the global seed");
    run_cmd->add_flag("--force", r_force, "Rebuild stages left incomplete by other configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (vocab_cmd->parsed()) {
            if (v_manifest.empty() && v_merge.empty()) {
                throw gk::ValidationError("vocab needs --manifest or --from-counts");
            }
            return run_vocab(v_manifest, v_output, v_mft, v_max, v_merge, v_counts_out);
        }
        if (cooccur_cmd->parsed()) {
            return run_cooccur(c_manifest, c_vocab, c_output, c_window, c_weighting, c_memory,
                               c_merge_parts, c_merge_vocabs);
        }
        if (shuffle_cmd->parsed()) return run_shuffle(s_input, s_output, s_seed, s_memory, s_temp);
        if (train_cmd->parsed()) {
            if (t_profile_50d) {
                const auto base = gk::TrainConfig::wiki_giga_50d();
                if (!train_cmd->count("--eta")) t_cfg.eta = base.eta;
                if (!train_cmd->count("--seed")) t_cfg.seed = base.seed;
                if (!train_cmd->count("--dim")) t_cfg.dim = base.dim;
            }
            return run_train(t_input, t_vocab, t_cfg, t_params, t_costs);
        }
        if (export_cmd->parsed()) {
            return run_export(e_params, e_vocab, e_mode, e_output, e_precision, e_binary);
        }
        if (eval_cmd->parsed()) {
            return run_eval(ev_vectors, ev_analogy, ev_similarity, ev_skip_header, ev_report_dir,
                            ev_threads);
        }
        if (diff_cmd->parsed()) {
            return run_diff(d_new, d_old, d_output, d_keep_digits, d_keep_nonlatin);
        }
        if (wls_cmd->parsed()) {
            return run_wls(w_params, w_vocab, w_cooc, w_words, w_sample, w_seed, w_output,
                           w_alpha, w_xmax);
        }
        if (mft_cmd->parsed()) {
            return run_mft(m_manifest, m_candidates, m_cfg, m_opts, m_output);
        }
        if (nn_cmd->parsed()) return run_neighbors(n_vectors, n_word, n_k);
        if (run_cmd->parsed()) return run_run(r_config, r_workdir, r_threads, r_seed, r_force);
    } catch (const gk::ResumeConflictError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const gk::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const gk::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
