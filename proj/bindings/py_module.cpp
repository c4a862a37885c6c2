// Python bindings for the core operations: corpus streaming, vocabulary
// construction, cooccurrence building/merging/shuffling, AdaGrad training,
// embedding export, evaluation, lexicon diff, WLS diagnostics and the
// pipeline orchestrator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "glovekit/cooccur.hpp"
#include "glovekit/corpus.hpp"
#include "glovekit/diagnostics.hpp"
#include "glovekit/embeddings.hpp"
#include "glovekit/errors.hpp"
#include "glovekit/eval.hpp"
#include "glovekit/pipeline.hpp"
#include "glovekit/shuffle.hpp"
#include "glovekit/synth.hpp"
#include "glovekit/trainer.hpp"
#include "glovekit/version.hpp"
#include "glovekit/vocab.hpp"

namespace py = pybind11;
using namespace glovekit;

namespace {

using Docs = std::vector<std::vector<std::string>>;
using Records = std::vector<CoocRecord>;

Records tuples_to_records(const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& t) {
    Records out;
    out.reserve(t.size());
    for (const auto& [i, j, x] : t) out.push_back({i, j, x});
    return out;
}

std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> records_to_tuples(
    const Records& recs) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.emplace_back(r.row, r.col, r.value);
    return out;
}

CoocOptions make_cooc_options(std::uint32_t window, const std::string& weighting,
                              std::size_t memory_mb) {
    CoocOptions opts;
    opts.window = window;
    opts.weighting = weighting_from_name(weighting);
    opts.memory_budget_bytes = memory_mb << 20;
    return opts;
}

py::dict report_to_dict(const EvalReport& r) {
    py::dict d;
    d["dataset"] = r.dataset;
    d["metric"] = r.metric;
    d["value"] = r.value;
    d["answered"] = r.answered;
    d["skipped"] = r.skipped;
    d["oov_policy"] = r.oov_policy;
    d["case_folding"] = r.case_folding;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GloVe embedding pipeline: vocabulary, cooccurrence, training, evaluation";
    m.attr("__version__") = kGlovekitVersion;

    py::register_exception<ValidationError>(m, "GlovekitValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "GlovekitParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "GlovekitIoError", PyExc_OSError);
    py::register_exception<TrainingError>(m, "GlovekitTrainingError", PyExc_RuntimeError);

    // ---- corpus ----------------------------------------------------------
    py::class_<CorpusManifest>(m, "CorpusManifest")
        .def(py::init([](const std::vector<std::pair<std::string, std::uint32_t>>& sources,
                         const std::vector<std::string>& stop_tokens, bool lowercase) {
                 CorpusManifest mf;
                 for (const auto& [path, repeat] : sources) {
                     mf.sources.push_back({path, repeat});
                 }
                 mf.stop_tokens.insert(stop_tokens.begin(), stop_tokens.end());
                 mf.lowercase = lowercase;
                 mf.validate();
                 return mf;
             }),
             py::arg("sources"), py::arg("stop_tokens") = std::vector<std::string>{},
             py::arg("lowercase") = false)
        .def_static("load", &CorpusManifest::load, py::arg("path"))
        .def_property_readonly("sources",
                               [](const CorpusManifest& mf) {
                                   std::vector<std::pair<std::string, std::uint32_t>> out;
                                   for (const auto& s : mf.sources) {
                                       out.emplace_back(s.path.string(), s.repeat);
                                   }
                                   return out;
                               })
        .def_property_readonly("stop_tokens",
                               [](const CorpusManifest& mf) {
                                   return std::vector<std::string>(mf.stop_tokens.begin(),
                                                                   mf.stop_tokens.end());
                               })
        .def_readonly("lowercase", &CorpusManifest::lowercase);

    m.def(
        "stream_documents",
        [](const CorpusManifest& mf) {
            TokenStream stream(mf);
            Docs docs;
            std::vector<std::string> tokens;
            while (stream.next(tokens)) docs.push_back(tokens);
            return docs;
        },
        py::arg("manifest"), "Read a manifest's cleaned documents into memory");

    // ---- vocab -----------------------------------------------------------
    py::class_<Vocabulary>(m, "Vocabulary")
        .def_static(
            "build",
            [](const CountTable& counts, std::uint64_t mft,
               std::optional<std::uint64_t> max_size) {
                return Vocabulary::build(counts, mft, max_size);
            },
            py::arg("counts"), py::arg("mft") = 1, py::arg("max_size") = py::none())
        .def_static(
            "merge",
            [](const std::vector<CountTable>& parts, std::uint64_t mft,
               std::optional<std::uint64_t> max_size) {
                return Vocabulary::merge(parts, mft, max_size);
            },
            py::arg("parts"), py::arg("mft") = 1, py::arg("max_size") = py::none())
        .def_static("load", &Vocabulary::load, py::arg("path"))
        .def("save", &Vocabulary::save, py::arg("path"))
        .def("__len__", &Vocabulary::size)
        .def("word", &Vocabulary::word, py::arg("index"))
        .def("count", &Vocabulary::count, py::arg("index"))
        .def("find", [](const Vocabulary& v, const std::string& w) { return v.find(w); },
             py::arg("word"))
        .def("items", [](const Vocabulary& v) {
            std::vector<std::pair<std::string, std::uint64_t>> out;
            out.reserve(v.size());
            for (const auto& e : v.entries()) out.emplace_back(e.word, e.count);
            return out;
        });

    m.def(
        "count_tokens",
        [](const Docs& docs) {
            MemoryCorpus corpus(docs);
            return count_tokens(corpus);
        },
        py::arg("documents"));
    m.def(
        "count_tokens_from_manifest",
        [](const CorpusManifest& mf) {
            TokenStream stream(mf);
            return count_tokens(stream);
        },
        py::arg("manifest"));

    // ---- cooccur / shuffle -------------------------------------------------
    m.def(
        "build_cooccurrence",
        [](const Docs& docs, const Vocabulary& vocab, std::uint32_t window,
           const std::string& weighting, std::size_t memory_mb) {
            MemoryCorpus corpus(docs);
            return records_to_tuples(
                build_cooccurrence(corpus, vocab, make_cooc_options(window, weighting, memory_mb)));
        },
        py::arg("documents"), py::arg("vocab"), py::arg("window") = 10,
        py::arg("weighting") = "harmonic", py::arg("memory_mb") = 256);
    m.def(
        "build_cooccurrence_file",
        [](const CorpusManifest& mf, const Vocabulary& vocab, const std::filesystem::path& out,
           std::uint32_t window, const std::string& weighting, std::size_t memory_mb) {
            TokenStream stream(mf);
            build_cooccurrence_file(stream, vocab, make_cooc_options(window, weighting, memory_mb),
                                    out);
        },
        py::arg("manifest"), py::arg("vocab"), py::arg("output"), py::arg("window") = 10,
        py::arg("weighting") = "harmonic", py::arg("memory_mb") = 256);
    m.def(
        "merge_cooccurrences",
        [](const std::vector<std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>>& parts,
           const std::vector<std::vector<std::int64_t>>& remaps, std::uint64_t merged_vocab_size,
           std::uint32_t window, const std::string& weighting) {
            std::vector<Records> recs;
            recs.reserve(parts.size());
            for (const auto& p : parts) recs.push_back(tuples_to_records(p));
            return records_to_tuples(
                merge_cooccurrences(recs, remaps, merged_vocab_size,
                                    weight_scale(window, weighting_from_name(weighting))));
        },
        py::arg("parts"), py::arg("remaps"), py::arg("merged_vocab_size"), py::arg("window") = 10,
        py::arg("weighting") = "harmonic");
    m.def("remap_from_vocabs", &remap_from_vocabs, py::arg("part"), py::arg("merged"));
    m.def(
        "shuffle_records",
        [](const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& records,
           std::uint64_t seed) {
            auto recs = tuples_to_records(records);
            shuffle_records(recs, seed);
            return records_to_tuples(recs);
        },
        py::arg("records"), py::arg("seed"));
    m.def(
        "shuffle_file",
        [](const std::filesystem::path& in, const std::filesystem::path& out, std::uint64_t seed,
           std::size_t memory_mb) {
            ShuffleOptions opts;
            opts.seed = seed;
            opts.memory_budget_bytes = memory_mb << 20;
            shuffle_file(in, out, opts);
        },
        py::arg("input"), py::arg("output"), py::arg("seed"), py::arg("memory_mb") = 256);
    m.def("read_records",
          [](const std::filesystem::path& path) { return records_to_tuples(read_all_records(path)); },
          py::arg("path"));
    m.def(
        "write_records",
        [](const std::filesystem::path& path,
           const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& records) {
            write_all_records(path, tuples_to_records(records));
        },
        py::arg("path"), py::arg("records"));

    // ---- trainer -----------------------------------------------------------
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init([](std::uint32_t dim, double eta, double alpha, double xmax,
                         std::uint32_t epochs, std::uint64_t seed, std::uint32_t threads) {
                 TrainConfig cfg;
                 cfg.dim = dim;
                 cfg.eta = eta;
                 cfg.alpha = alpha;
                 cfg.xmax = xmax;
                 cfg.epochs = epochs;
                 cfg.seed = seed;
                 cfg.threads = threads;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("dim") = 50, py::arg("eta") = 0.05, py::arg("alpha") = 0.75,
             py::arg("xmax") = 100.0, py::arg("epochs") = 0, py::arg("seed") = 2024,
             py::arg("threads") = 1)
        .def_static("wiki_giga_50d", &TrainConfig::wiki_giga_50d)
        .def_readwrite("dim", &TrainConfig::dim)
        .def_readwrite("eta", &TrainConfig::eta)
        .def_readwrite("alpha", &TrainConfig::alpha)
        .def_readwrite("xmax", &TrainConfig::xmax)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("threads", &TrainConfig::threads)
        .def_property_readonly("effective_epochs", &TrainConfig::effective_epochs);

    py::class_<ModelParams>(m, "ModelParams")
        .def_readonly("dim", &ModelParams::dim)
        .def_readonly("vocab", &ModelParams::vocab)
        .def("save", &ModelParams::save, py::arg("path"))
        .def_static("load", &ModelParams::load, py::arg("path"))
        .def("w_row",
             [](const ModelParams& p, std::uint32_t i) {
                 auto row = p.w_row(i);
                 return std::vector<double>(row.begin(), row.end());
             })
        .def("wc_row", [](const ModelParams& p, std::uint32_t j) {
            auto row = p.wc_row(j);
            return std::vector<double>(row.begin(), row.end());
        });

    m.def("weight", &weight, py::arg("x"), py::arg("alpha") = 0.75, py::arg("xmax") = 100.0);
    m.def(
        "train",
        [](const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& records,
           std::uint64_t vocab_size, const TrainConfig& cfg) {
            MemoryRecordStore store(tuples_to_records(records));
            TrainResult result = train(store, vocab_size, cfg);
            return py::make_tuple(std::move(result.params), result.epoch_mean_cost,
                                  result.skipped);
        },
        py::arg("records"), py::arg("vocab_size"), py::arg("config"),
        "Returns (params, epoch_mean_costs, skipped)");
    m.def(
        "train_file",
        [](const std::filesystem::path& records, std::uint64_t vocab_size,
           const TrainConfig& cfg) {
            FileRecordStore store(records);
            TrainResult result = train(store, vocab_size, cfg);
            return py::make_tuple(std::move(result.params), result.epoch_mean_cost,
                                  result.skipped);
        },
        py::arg("records"), py::arg("vocab_size"), py::arg("config"));

    // ---- embeddings ----------------------------------------------------------
    py::class_<EmbeddingSet>(m, "EmbeddingSet")
        .def_property_readonly("dim", &EmbeddingSet::dim)
        .def("__len__", &EmbeddingSet::size)
        .def("words", [](const EmbeddingSet& e) { return e.words(); })
        .def("find", [](const EmbeddingSet& e, const std::string& w) { return e.find(w); })
        .def("vector",
             [](const EmbeddingSet& e, std::uint32_t i) {
                 auto v = e.vector(i);
                 return std::vector<double>(v.begin(), v.end());
             })
        .def("word_vector",
             [](const EmbeddingSet& e, const std::string& w) {
                 auto idx = e.find(w);
                 if (!idx) throw ValidationError("word '" + w + "' not in embedding set");
                 auto v = e.vector(*idx);
                 return std::vector<double>(v.begin(), v.end());
             })
        .def("save_text", &EmbeddingSet::save_text, py::arg("path"), py::arg("precision") = 6)
        .def_static("load_text", &EmbeddingSet::load_text, py::arg("path"))
        .def("save_binary", &EmbeddingSet::save_binary, py::arg("path"))
        .def_static("load_binary", &EmbeddingSet::load_binary, py::arg("path"));

    m.def(
        "export_embeddings",
        [](const ModelParams& params, const Vocabulary& vocab, const std::string& mode) {
            return export_embeddings(params, vocab, export_mode_from_name(mode));
        },
        py::arg("params"), py::arg("vocab"), py::arg("mode") = "sum");

    // ---- eval ------------------------------------------------------------------
    m.def(
        "analogy_eval",
        [](const EmbeddingSet& emb,
           const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& qs,
           std::uint32_t threads) {
            std::vector<AnalogyQuestion> questions;
            questions.reserve(qs.size());
            for (const auto& [a, b, c, gold] : qs) questions.push_back({a, b, c, gold});
            return report_to_dict(analogy_eval(emb, questions, threads));
        },
        py::arg("embeddings"), py::arg("questions"), py::arg("threads") = 1);
    m.def(
        "similarity_eval",
        [](const EmbeddingSet& emb,
           const std::vector<std::tuple<std::string, std::string, double>>& ps) {
            std::vector<SimilarityPair> pairs;
            pairs.reserve(ps.size());
            for (const auto& [w1, w2, s] : ps) pairs.push_back({w1, w2, s});
            return report_to_dict(similarity_eval(emb, pairs));
        },
        py::arg("embeddings"), py::arg("pairs"));
    m.def("load_analogy_file",
          [](const std::filesystem::path& path) {
              std::vector<std::tuple<std::string, std::string, std::string, std::string>> out;
              for (const auto& q : load_analogy_file(path)) {
                  out.emplace_back(q.a, q.b, q.c, q.gold);
              }
              return out;
          },
          py::arg("path"));
    m.def(
        "load_similarity_file",
        [](const std::filesystem::path& path, bool skip_header) {
            SimilarityFormat fmt;
            fmt.skip_header = skip_header;
            std::vector<std::tuple<std::string, std::string, double>> out;
            for (const auto& p : load_similarity_file(path, fmt)) {
                out.emplace_back(p.w1, p.w2, p.human_score);
            }
            return out;
        },
        py::arg("path"), py::arg("skip_header") = false);
    m.def("nearest_neighbors",
          [](const EmbeddingSet& emb, const std::string& word, std::size_t k) {
              return nearest_neighbors(emb, word, k);
          },
          py::arg("embeddings"), py::arg("word"), py::arg("k") = 10);
    m.def("spearman_rho",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              return spearman_rho(a, b);
          },
          py::arg("a"), py::arg("b"));
    m.def(
        "lexicon_diff",
        [](const Vocabulary& new_vocab, const Vocabulary& old_vocab, bool exclude_digits,
           bool exclude_nonlatin) {
            DiffOptions opts;
            opts.exclude_digit_words = exclude_digits;
            opts.exclude_nonlatin_words = exclude_nonlatin;
            return lexicon_diff(new_vocab, old_vocab, opts);
        },
        py::arg("new_vocab"), py::arg("old_vocab"), py::arg("exclude_digits") = true,
        py::arg("exclude_nonlatin") = true);

    // ---- diagnostics -------------------------------------------------------------
    m.def(
        "wls_vector",
        [](std::uint32_t word_index, const ModelParams& params,
           const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& row,
           const TrainConfig& cfg) {
            const auto recs = tuples_to_records(row);
            const WlsResult r = wls_vector(word_index, params, recs, cfg);
            py::dict d;
            d["word_index"] = r.word_index;
            d["wls"] = r.wls;
            d["cosine"] = r.cosine_defined ? py::cast(r.cosine) : py::none();
            d["rank_deficient"] = r.rank_deficient;
            d["support"] = r.support;
            d["objective_wls"] = r.objective_wls;
            d["objective_trained"] = r.objective_trained;
            return d;
        },
        py::arg("word_index"), py::arg("params"), py::arg("row"), py::arg("config"));
    m.def(
        "mft_selection",
        [](const Docs& docs, const std::vector<std::uint64_t>& candidates, const TrainConfig& cfg,
           std::uint32_t window, std::uint64_t sample_size, std::uint64_t shuffle_seed,
           std::uint64_t sample_seed) {
            MemoryCorpus corpus(docs);
            MftOptions opts;
            opts.window = window;
            opts.sample_size = sample_size;
            opts.shuffle_seed = shuffle_seed;
            opts.sample_seed = sample_seed;
            const MftResult result = mft_selection(corpus, candidates, cfg, opts);
            py::list table;
            for (const auto& s : result.table) {
                py::dict d;
                d["mft"] = s.mft;
                d["vocab_size"] = s.vocab_size;
                d["mean_cosine"] = s.excluded ? py::none() : py::cast(s.mean_cosine);
                d["sample_size"] = s.sample_size;
                d["excluded"] = s.excluded;
                d["note"] = s.note;
                table.append(d);
            }
            return py::make_tuple(result.chosen ? py::cast(*result.chosen) : py::none(), table);
        },
        py::arg("documents"), py::arg("candidates"), py::arg("config"), py::arg("window") = 10,
        py::arg("sample_size") = 200, py::arg("shuffle_seed") = 123, py::arg("sample_seed") = 7,
        "Returns (chosen_mft, score_table)");

    // ---- pipeline / synth -----------------------------------------------------
    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config,
           std::optional<std::filesystem::path> workdir, std::optional<std::uint32_t> threads,
           std::optional<std::uint64_t> seed, bool force) {
            PipelineOverrides overrides;
            overrides.workdir = std::move(workdir);
            overrides.threads = threads;
            overrides.seed = seed;
            overrides.force = force;
            const PipelineResult result = run_pipeline(config, overrides);
            py::list stages;
            for (const auto& s : result.stages) {
                py::dict d;
                d["name"] = s.name;
                d["cache_hit"] = s.cache_hit;
                d["seconds"] = s.seconds;
                stages.append(d);
            }
            py::dict out;
            out["stages"] = stages;
            out["workdir"] = result.workdir.string();
            out["manifest"] = result.manifest_path.string();
            return out;
        },
        py::arg("config"), py::arg("workdir") = py::none(), py::arg("threads") = py::none(),
        py::arg("seed") = py::none(), py::arg("force") = false);
    m.def(
        "write_synth_corpus",
        [](const std::filesystem::path& path, std::uint64_t seed, std::size_t target_bytes,
           std::uint32_t vocab_size) {
            SynthOptions opts;
            opts.seed = seed;
            opts.target_bytes = target_bytes;
            opts.vocab_size = vocab_size;
            write_synth_corpus(path, opts);
        },
        py::arg("path"), py::arg("seed") = 42, py::arg("target_bytes") = 1 << 20,
        py::arg("vocab_size") = 2000);
}
