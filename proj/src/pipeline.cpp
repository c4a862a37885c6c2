#include "glovekit/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <map>

#include <fcntl.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "glovekit/diagnostics.hpp"
#include "glovekit/digest.hpp"
#include "glovekit/errors.hpp"
#include "glovekit/rng.hpp"
#include "glovekit/shuffle.hpp"
#include "glovekit/version.hpp"

namespace glovekit {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, std::filesystem::path p) {
    if (p.is_absolute()) return p;
    return base / p;
}

} // namespace

TrainConfig PipelineConfig::effective_train() const {
    TrainConfig cfg = train;
    if (!train_seed_explicit) cfg.seed = seed;
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    PipelineConfig cfg;
    try {
        if (j.contains("workdir")) cfg.workdir = resolve(base, j["workdir"].get<std::string>());
        else cfg.workdir = base / "run";

        const auto& corpus = j.at("corpus");
        cfg.corpus_manifest = resolve(base, corpus.at("manifest").get<std::string>());

        if (j.contains("vocab")) {
            const auto& v = j["vocab"];
            cfg.mft = v.value("mft", cfg.mft);
            if (v.contains("max_size") && !v["max_size"].is_null()) {
                cfg.max_vocab = v["max_size"].get<std::uint64_t>();
            }
            if (v.contains("spill_entries") && !v["spill_entries"].is_null()) {
                cfg.vocab_spill_entries = v["spill_entries"].get<std::size_t>();
            }
        }
        if (j.contains("cooccur")) {
            const auto& c = j["cooccur"];
            cfg.window = c.value("window", cfg.window);
            if (c.contains("weighting")) {
                cfg.weighting = weighting_from_name(c["weighting"].get<std::string>());
            }
            cfg.cooccur_memory_mb = c.value("memory_mb", cfg.cooccur_memory_mb);
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("shuffle")) {
            const auto& s = j["shuffle"];
            if (s.contains("seed") && !s["seed"].is_null()) {
                cfg.shuffle_seed = s["seed"].get<std::uint64_t>();
            }
            cfg.shuffle_memory_mb = s.value("memory_mb", cfg.shuffle_memory_mb);
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            cfg.train.dim = t.value("dim", cfg.train.dim);
            cfg.train.eta = t.value("eta", cfg.train.eta);
            cfg.train.alpha = t.value("alpha", cfg.train.alpha);
            cfg.train.xmax = t.value("xmax", cfg.train.xmax);
            cfg.train.epochs = t.value("epochs", cfg.train.epochs);
            if (t.contains("seed") && !t["seed"].is_null()) {
                cfg.train.seed = t["seed"].get<std::uint64_t>();
                cfg.train_seed_explicit = true;
            }
            cfg.train.threads = t.value("threads", cfg.train.threads);
        }
        if (j.contains("export")) {
            const auto& e = j["export"];
            if (e.contains("mode")) cfg.export_mode = export_mode_from_name(e["mode"].get<std::string>());
            cfg.export_precision = e.value("precision", cfg.export_precision);
            cfg.export_binary = e.value("binary", cfg.export_binary);
        }
        if (j.contains("eval")) {
            const auto& e = j["eval"];
            for (const auto& a : e.value("analogy", json::array())) {
                AnalogyDatasetConfig d;
                d.name = a.at("name").get<std::string>();
                d.path = resolve(base, a.at("path").get<std::string>());
                cfg.analogy_datasets.push_back(std::move(d));
            }
            for (const auto& s : e.value("similarity", json::array())) {
                SimilarityDatasetConfig d;
                d.name = s.at("name").get<std::string>();
                d.path = resolve(base, s.at("path").get<std::string>());
                if (s.contains("delimiter")) {
                    const auto delim = s["delimiter"].get<std::string>();
                    if (delim == "auto") d.format.delimiter = '\0';
                    else if (delim == "tab") d.format.delimiter = '\t';
                    else if (delim == "comma") d.format.delimiter = ',';
                    else if (delim == "semicolon") d.format.delimiter = ';';
                    else if (delim == "space") d.format.delimiter = ' ';
                    else throw ValidationError("eval delimiter must be auto|tab|comma|semicolon|space");
                }
                d.format.skip_header = s.value("skip_header", false);
                d.format.scale = s.value("scale", std::string());
                cfg.similarity_datasets.push_back(std::move(d));
            }
            cfg.eval_threads = e.value("threads", cfg.eval_threads);
        }
        if (j.contains("wls") && !j["wls"].is_null()) {
            WlsStageConfig w;
            w.sample_size = j["wls"].value("sample", w.sample_size);
            w.sample_seed = j["wls"].value("seed", w.sample_seed);
            cfg.wls = w;
        }
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
    cfg.validate();
    return cfg;
}

void PipelineConfig::validate() const {
    if (corpus_manifest.empty()) throw ValidationError("config field corpus.manifest is required");
    if (mft < 1) throw ValidationError("config field vocab.mft must be >= 1");
    if (max_vocab && *max_vocab < 1) throw ValidationError("config field vocab.max_size must be >= 1");
    if (window < 1 || window > kMaxWindow) {
        throw ValidationError("config field cooccur.window must be in [1, " +
                              std::to_string(kMaxWindow) + "]");
    }
    if (cooccur_memory_mb < 1) throw ValidationError("config field cooccur.memory_mb must be >= 1");
    if (shuffle_memory_mb < 1) throw ValidationError("config field shuffle.memory_mb must be >= 1");
    effective_train().validate();
    if (export_precision < 1 || export_precision > 17) {
        throw ValidationError("config field export.precision must be in [1, 17]");
    }
    for (const auto& d : analogy_datasets) {
        if (d.name.empty()) throw ValidationError("eval.analogy entries need a name");
    }
    for (const auto& d : similarity_datasets) {
        if (d.name.empty()) throw ValidationError("eval.similarity entries need a name");
    }
}

namespace {

// -------------------------------------------------------------------------
// Run manifest and staging

struct StageRecord {
    std::string params_digest;
    std::map<std::string, std::string> inputs;  // path (relative label) -> digest
    std::map<std::string, std::string> outputs;
    double seconds = 0.0;
    bool cache_hit = false;
};

struct RunManifest {
    std::string config_digest;
    json config_snapshot;
    std::map<std::string, StageRecord> stages;

    json to_json() const {
        json stages_json = json::object();
        for (const auto& [name, rec] : stages) {
            stages_json[name] = {
                {"params_digest", rec.params_digest}, {"inputs", rec.inputs},
                {"outputs", rec.outputs},             {"seconds", rec.seconds},
                {"cache_hit", rec.cache_hit},
            };
        }
        return json{
            {"tool", {{"name", "glovekit"}, {"version", kGlovekitVersion}}},
            {"rng", "splitmix64"},
            {"config_digest", config_digest},
            {"config", config_snapshot},
            {"stages", stages_json},
        };
    }

    static RunManifest from_json(const json& j) {
        RunManifest m;
        m.config_digest = j.value("config_digest", "");
        if (j.contains("config")) m.config_snapshot = j["config"];
        if (j.contains("stages")) {
            for (const auto& [name, rec] : j["stages"].items()) {
                StageRecord r;
                r.params_digest = rec.value("params_digest", "");
                if (rec.contains("inputs")) {
                    r.inputs = rec["inputs"].get<std::map<std::string, std::string>>();
                }
                if (rec.contains("outputs")) {
                    r.outputs = rec["outputs"].get<std::map<std::string, std::string>>();
                }
                r.seconds = rec.value("seconds", 0.0);
                r.cache_hit = rec.value("cache_hit", false);
                m.stages[name] = std::move(r);
            }
        }
        return m;
    }
};

/// Held for the duration of a run; one pipeline instance per workdir.
class WorkdirLock {
public:
    explicit WorkdirLock(const std::filesystem::path& workdir)
        : path_(workdir / ".glovekit.lock") {
        fd_ = ::open(path_.string().c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw IoError("workdir '" + workdir.string() +
                          "' is locked by another run (remove " + path_.string() +
                          " if that run is dead)");
        }
        const auto pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
    }
    ~WorkdirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

class StageRunner {
public:
    StageRunner(const std::filesystem::path& workdir, RunManifest& manifest,
                const RunManifest* previous, PipelineResult& result, bool force,
                const std::filesystem::path& manifest_path)
        : workdir_(workdir),
          manifest_(manifest),
          previous_(previous),
          result_(result),
          force_(force),
          manifest_path_(manifest_path) {}

    /// Runs or skips one stage. `inputs` maps label -> file that must
    /// exist; `outputs` lists files the stage promises to produce.
    template <typename Fn>
    void stage(const std::string& name, const json& params,
               const std::map<std::string, std::filesystem::path>& inputs,
               const std::vector<std::filesystem::path>& outputs, Fn&& body) {
        const std::string params_digest = to_hex(digest_bytes(params.dump()));
        std::map<std::string, std::string> input_digests;
        for (const auto& [label, path] : inputs) {
            if (!std::filesystem::exists(path)) {
                throw IoError("stage " + name + ": missing input '" + path.string() + "'");
            }
            input_digests[label] = digest_file_hex(path);
        }

        const auto marker = workdir_ / (name + ".incomplete");
        if (std::filesystem::exists(marker)) {
            const bool same_config =
                previous_ && previous_->config_digest == manifest_.config_digest;
            if (!same_config && !force_) {
                throw ResumeConflictError(
                    "stage " + name + " left incomplete by a run with a different " +
                    "configuration; rerun with --force or clean '" + workdir_.string() + "'");
            }
            std::filesystem::remove(marker);
        }

        if (previous_) {
            auto it = previous_->stages.find(name);
            if (it != previous_->stages.end() && it->second.params_digest == params_digest &&
                it->second.inputs == input_digests && outputs_intact(it->second)) {
                StageRecord rec = it->second;
                rec.cache_hit = true;
                rec.seconds = 0.0;
                manifest_.stages[name] = std::move(rec);
                result_.stages.push_back({name, true, 0.0});
                save_manifest();
                return;
            }
        }

        { std::ofstream m(marker); m << "running\n"; }
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();

        StageRecord rec;
        rec.params_digest = params_digest;
        rec.inputs = std::move(input_digests);
        for (const auto& out : outputs) {
            if (!std::filesystem::exists(out)) {
                throw IoError("stage " + name + " did not produce '" + out.string() + "'");
            }
            rec.outputs[out.filename().string()] = digest_file_hex(out);
        }
        rec.seconds = std::chrono::duration<double>(t1 - t0).count();
        manifest_.stages[name] = std::move(rec);
        std::filesystem::remove(marker);
        result_.stages.push_back({name, false, std::chrono::duration<double>(t1 - t0).count()});
        save_manifest();
    }

private:
    bool outputs_intact(const StageRecord& rec) const {
        for (const auto& [file, digest] : rec.outputs) {
            const auto path = workdir_ / file;
            if (!std::filesystem::exists(path)) return false;
            if (digest_file_hex(path) != digest) return false;
        }
        return true;
    }

    void save_manifest() const {
        atomic_write_file(manifest_path_, manifest_.to_json().dump(2) + "\n");
    }

    std::filesystem::path workdir_;
    RunManifest& manifest_;
    const RunManifest* previous_;
    PipelineResult& result_;
    bool force_;
    std::filesystem::path manifest_path_;
};

json config_snapshot_json(const PipelineConfig& cfg) {
    json similarity = json::array();
    for (const auto& d : cfg.similarity_datasets) {
        similarity.push_back({{"name", d.name},
                              {"path", d.path.string()},
                              {"delimiter", std::string(1, d.format.delimiter ? d.format.delimiter : 'a')},
                              {"skip_header", d.format.skip_header},
                              {"scale", d.format.scale}});
    }
    json analogy = json::array();
    for (const auto& d : cfg.analogy_datasets) {
        analogy.push_back({{"name", d.name}, {"path", d.path.string()}});
    }
    const TrainConfig t = cfg.effective_train();
    return json{
        {"corpus_manifest", cfg.corpus_manifest.string()},
        {"vocab", {{"mft", cfg.mft}, {"max_size", cfg.max_vocab ? json(*cfg.max_vocab) : json()}}},
        {"cooccur",
         {{"window", cfg.window}, {"weighting", weighting_name(cfg.weighting)}}},
        {"shuffle", {{"seed", cfg.effective_shuffle_seed()}, {"memory_mb", cfg.shuffle_memory_mb}}},
        {"train",
         {{"dim", t.dim},
          {"eta", t.eta},
          {"alpha", t.alpha},
          {"xmax", t.xmax},
          {"epochs", t.effective_epochs()},
          {"seed", t.seed},
          {"threads", t.threads}}},
        {"export",
         {{"mode", export_mode_name(cfg.export_mode)},
          {"precision", cfg.export_precision},
          {"binary", cfg.export_binary}}},
        {"eval", {{"analogy", analogy}, {"similarity", similarity}}},
        {"wls", cfg.wls ? json{{"sample", cfg.wls->sample_size}, {"seed", cfg.wls->sample_seed}}
                        : json()},
    };
}

// Streaming WLS over an aggregated cooccurrence file: first pass finds
// rows with support >= dim, a seeded sample is drawn, second pass solves
// the sampled rows.
void run_wls_stage(const std::filesystem::path& cooc_path, const ModelParams& params,
                   const TrainConfig& cfg, const WlsStageConfig& wcfg,
                   const std::filesystem::path& out_path) {
    std::vector<std::uint32_t> eligible;
    {
        RecordReader reader(cooc_path);
        CoocRecord rec;
        bool have = false;
        std::uint32_t row = 0;
        std::uint64_t support = 0;
        auto close_row = [&] {
            if (have && support >= cfg.dim) eligible.push_back(row);
        };
        while (reader.next(rec)) {
            if (!have || rec.row != row) {
                close_row();
                row = rec.row;
                support = 1;
                have = true;
            } else {
                ++support;
            }
        }
        close_row();
    }
    if (eligible.size() > wcfg.sample_size) {
        auto rng = substream(wcfg.sample_seed, RngStage::sampling, 0);
        fisher_yates(std::span<std::uint32_t>(eligible), rng);
        eligible.resize(static_cast<std::size_t>(wcfg.sample_size));
        std::sort(eligible.begin(), eligible.end());
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write wls table '" + out_path.string() + "'");
    out << "word_index\tsupport\tcosine\tobjective_wls\tobjective_trained\trank_deficient\n";
    double cosine_sum = 0.0;
    std::uint64_t cosine_n = 0;

    RecordReader reader(cooc_path);
    CoocRecord rec;
    std::vector<CoocRecord> row_buf;
    std::size_t next = 0; // next eligible row to look for (rows ascend)
    bool collecting = false;
    auto flush_row = [&] {
        if (row_buf.empty()) return;
        const WlsResult r = wls_vector(row_buf.front().row, params, row_buf, cfg);
        out << r.word_index << '\t' << r.support << '\t';
        if (r.cosine_defined) {
            out << r.cosine;
            cosine_sum += r.cosine;
            ++cosine_n;
        } else {
            out << "nan";
        }
        out << '\t' << r.objective_wls << '\t' << r.objective_trained << '\t'
            << (r.rank_deficient ? 1 : 0) << '\n';
        row_buf.clear();
    };
    while (next < eligible.size() && reader.next(rec)) {
        if (collecting && rec.row != row_buf.front().row) {
            flush_row();
            collecting = false;
            ++next;
            if (next >= eligible.size()) break;
        }
        if (collecting) {
            row_buf.push_back(rec);
            continue;
        }
        while (next < eligible.size() && eligible[next] < rec.row) ++next;
        if (next >= eligible.size()) break;
        if (rec.row == eligible[next]) {
            row_buf.push_back(rec);
            collecting = true;
        }
    }
    if (collecting) flush_row();
    if (cosine_n > 0) {
        out << "# mean_cosine\t" << (cosine_sum / double(cosine_n)) << "\t# over\t" << cosine_n
            << "\twords\n";
    }
    if (!out) throw IoError("write failed for wls table '" + out_path.string() + "'");
}

} // namespace

PipelineResult run_pipeline(const std::filesystem::path& config_path,
                            const PipelineOverrides& overrides) {
    PipelineConfig cfg = PipelineConfig::load(config_path);
    if (overrides.workdir) cfg.workdir = *overrides.workdir;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.threads) {
        cfg.train.threads = *overrides.threads;
        cfg.eval_threads = *overrides.threads;
    }
    cfg.validate();

    std::filesystem::create_directories(cfg.workdir);
    WorkdirLock lock(cfg.workdir);

    PipelineResult result;
    result.workdir = cfg.workdir;
    result.manifest_path = cfg.workdir / "run_manifest.json";

    RunManifest previous;
    bool have_previous = false;
    if (std::filesystem::exists(result.manifest_path)) {
        try {
            previous = RunManifest::from_json(json::parse(read_text_file(result.manifest_path)));
            have_previous = true;
        } catch (const json::parse_error&) {
            have_previous = false; // corrupt manifest: rebuild everything
        }
    }

    RunManifest manifest;
    manifest.config_snapshot = config_snapshot_json(cfg);
    manifest.config_digest = to_hex(digest_bytes(manifest.config_snapshot.dump()));

    StageRunner runner(cfg.workdir, manifest, have_previous ? &previous : nullptr, result,
                       overrides.force, result.manifest_path);

    const CorpusManifest corpus_manifest = CorpusManifest::load(cfg.corpus_manifest);
    std::map<std::string, std::filesystem::path> corpus_inputs{
        {"corpus_manifest", cfg.corpus_manifest}};
    for (const auto& src : corpus_manifest.sources) {
        corpus_inputs["corpus:" + src.path.filename().string()] = src.path;
    }

    const auto vocab_path = cfg.workdir / "vocab.txt";
    const auto cooc_path = cfg.workdir / "cooccurrence.bin";
    const auto shuf_path = cfg.workdir / "shuffled.bin";
    const auto params_path = cfg.workdir / "params.bin";
    const auto costs_path = cfg.workdir / "epoch_costs.tsv";
    const auto vectors_path = cfg.workdir / "vectors.txt";
    const auto vectors_bin_path = cfg.workdir / "vectors.bin";

    // --- vocab ---------------------------------------------------------
    runner.stage(
        "vocab",
        json{{"mft", cfg.mft}, {"max_size", cfg.max_vocab ? json(*cfg.max_vocab) : json()}},
        corpus_inputs, {vocab_path}, [&] {
            TokenStream stream(corpus_manifest);
            Vocabulary vocab;
            if (cfg.vocab_spill_entries) {
                SpillOptions sopts;
                sopts.max_entries = *cfg.vocab_spill_entries;
                sopts.spill_dir = cfg.workdir / "vocab_spill";
                auto runs = count_tokens_spilled(stream, sopts);
                vocab = build_vocab_from_runs(runs, cfg.mft, cfg.max_vocab);
                std::error_code ec;
                std::filesystem::remove_all(sopts.spill_dir, ec);
            } else {
                vocab = Vocabulary::build(count_tokens(stream), cfg.mft, cfg.max_vocab);
            }
            vocab.save(vocab_path);
        });

    // --- cooccur -------------------------------------------------------
    {
        auto inputs = corpus_inputs;
        inputs["vocab"] = vocab_path;
        runner.stage(
            "cooccur",
            json{{"window", cfg.window}, {"weighting", weighting_name(cfg.weighting)}}, inputs,
            {cooc_path}, [&] {
                TokenStream stream(corpus_manifest);
                Vocabulary vocab = Vocabulary::load(vocab_path);
                CoocOptions copts;
                copts.window = cfg.window;
                copts.weighting = cfg.weighting;
                copts.memory_budget_bytes = cfg.cooccur_memory_mb << 20;
                build_cooccurrence_file(stream, vocab, copts, cooc_path);
            });
    }

    // --- shuffle -------------------------------------------------------
    runner.stage("shuffle",
                 json{{"seed", cfg.effective_shuffle_seed()},
                      {"memory_mb", cfg.shuffle_memory_mb}},
                 {{"cooccurrence", cooc_path}}, {shuf_path}, [&] {
                     ShuffleOptions sopts;
                     sopts.seed = cfg.effective_shuffle_seed();
                     sopts.memory_budget_bytes = cfg.shuffle_memory_mb << 20;
                     shuffle_file(cooc_path, shuf_path, sopts);
                 });

    // --- train ---------------------------------------------------------
    const TrainConfig train_cfg = cfg.effective_train();
    runner.stage("train",
                 json{{"dim", train_cfg.dim},
                      {"eta", train_cfg.eta},
                      {"alpha", train_cfg.alpha},
                      {"xmax", train_cfg.xmax},
                      {"epochs", train_cfg.effective_epochs()},
                      {"seed", train_cfg.seed},
                      {"threads", train_cfg.threads}},
                 {{"shuffled", shuf_path}}, {params_path, costs_path}, [&] {
                     FileRecordStore store(shuf_path);
                     Vocabulary vocab = Vocabulary::load(vocab_path);
                     TrainResult tr = train(store, vocab.size(), train_cfg);
                     tr.params.save(params_path);
                     std::ofstream costs(costs_path, std::ios::binary);
                     costs << "epoch\tmean_cost\n";
                     for (std::size_t e = 0; e < tr.epoch_mean_cost.size(); ++e) {
                         costs << (e + 1) << '\t' << tr.epoch_mean_cost[e] << '\n';
                     }
                     costs << "# skipped\t" << tr.skipped << "\n";
                 });

    // --- export --------------------------------------------------------
    {
        std::vector<std::filesystem::path> outputs{vectors_path};
        if (cfg.export_binary) outputs.push_back(vectors_bin_path);
        runner.stage("export",
                     json{{"mode", export_mode_name(cfg.export_mode)},
                          {"precision", cfg.export_precision},
                          {"binary", cfg.export_binary}},
                     {{"params", params_path}, {"vocab", vocab_path}}, outputs, [&] {
                         ModelParams params = ModelParams::load(params_path);
                         Vocabulary vocab = Vocabulary::load(vocab_path);
                         EmbeddingSet emb = export_embeddings(params, vocab, cfg.export_mode);
                         emb.metadata()["config_digest"] = manifest.config_digest;
                         emb.metadata()["vocab_digest"] = vocabulary_digest(vocab);
                         emb.save_text(vectors_path, cfg.export_precision);
                         if (cfg.export_binary) emb.save_binary(vectors_bin_path);
                     });
    }

    // --- eval (optional) -------------------------------------------------
    if (!cfg.analogy_datasets.empty() || !cfg.similarity_datasets.empty()) {
        std::map<std::string, std::filesystem::path> inputs{{"vectors", vectors_path}};
        json params = json::array();
        std::vector<std::filesystem::path> outputs{cfg.workdir / "eval_report.json"};
        for (const auto& d : cfg.analogy_datasets) {
            inputs["analogy:" + d.name] = d.path;
            params.push_back({{"analogy", d.name}});
            outputs.push_back(cfg.workdir / ("eval_" + d.name + ".tsv"));
        }
        for (const auto& d : cfg.similarity_datasets) {
            inputs["similarity:" + d.name] = d.path;
            params.push_back({{"similarity", d.name},
                              {"skip_header", d.format.skip_header},
                              {"scale", d.format.scale}});
            outputs.push_back(cfg.workdir / ("eval_" + d.name + ".tsv"));
        }
        runner.stage("eval", params, inputs, outputs, [&] {
            EmbeddingSet emb = EmbeddingSet::load_text(vectors_path);
            Evaluator evaluator(emb, cfg.eval_threads);
            json summary = json::object();
            for (const auto& d : cfg.analogy_datasets) {
                const auto questions = load_analogy_file(d.path);
                EvalReport report = evaluator.analogy(d.name, questions);
                summary[d.name] = {{"metric", report.metric},
                                   {"value", report.value},
                                   {"answered", report.answered},
                                   {"skipped", report.skipped},
                                   {"oov_policy", report.oov_policy},
                                   {"case_folding", report.case_folding}};
                write_report_tsv(report, questions, {}, cfg.workdir / ("eval_" + d.name + ".tsv"));
            }
            for (const auto& d : cfg.similarity_datasets) {
                const auto pairs = load_similarity_file(d.path, d.format);
                EvalReport report = evaluator.similarity(d.name, pairs);
                summary[d.name] = {{"metric", report.metric},
                                   {"value", report.value},
                                   {"answered", report.answered},
                                   {"skipped", report.skipped},
                                   {"scale", d.format.scale},
                                   {"oov_policy", report.oov_policy},
                                   {"case_folding", report.case_folding}};
                write_report_tsv(report, {}, pairs, cfg.workdir / ("eval_" + d.name + ".tsv"));
            }
            atomic_write_file(cfg.workdir / "eval_report.json", summary.dump(2) + "\n");
        });
    }

    // --- wls (optional) --------------------------------------------------
    if (cfg.wls) {
        const auto wls_path = cfg.workdir / "wls_table.tsv";
        runner.stage("wls",
                     json{{"sample", cfg.wls->sample_size}, {"seed", cfg.wls->sample_seed}},
                     {{"params", params_path}, {"cooccurrence", cooc_path}}, {wls_path}, [&] {
                         ModelParams params = ModelParams::load(params_path);
                         run_wls_stage(cooc_path, params, train_cfg, *cfg.wls, wls_path);
                     });
    }

    return result;
}

} // namespace glovekit
