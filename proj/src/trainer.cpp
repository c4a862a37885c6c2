#include "glovekit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "glovekit/errors.hpp"
#include "glovekit/io_util.hpp"
#include "glovekit/rng.hpp"

namespace glovekit {

TrainConfig TrainConfig::wiki_giga_50d() {
    TrainConfig cfg;
    cfg.dim = 50;
    cfg.eta = 0.075;
    cfg.seed = 123;
    return cfg;
}

void TrainConfig::validate() const {
    if (dim < 1) throw ValidationError("dim must be >= 1");
    if (!(eta > 0.0)) throw ValidationError("eta (learning rate) must be > 0");
    if (!(alpha > 0.0) || alpha > 1.0) throw ValidationError("alpha must be in (0, 1]");
    if (!(xmax > 0.0)) throw ValidationError("xmax must be > 0");
    if (threads < 1) throw ValidationError("threads must be >= 1");
    if (!(max_skip_fraction >= 0.0)) throw ValidationError("max_skip_fraction must be >= 0");
}

ModelParams ModelParams::init(std::uint64_t vocab, std::uint32_t dim, std::uint64_t seed) {
    ModelParams p;
    p.dim = dim;
    p.vocab = vocab;
    const std::size_t mat = static_cast<std::size_t>(vocab) * dim;
    p.w.resize(mat);
    p.wc.resize(mat);
    p.b.resize(vocab);
    p.bc.resize(vocab);
    auto rng = substream(seed, RngStage::param_init, 0);
    const double span = 0.5 / dim;
    auto fill = [&](std::vector<double>& v) {
        for (auto& x : v) x = (rng.unit() - 0.5) * 2.0 * span;
    };
    fill(p.w);
    fill(p.wc);
    fill(p.b);
    fill(p.bc);
    p.grad_w.assign(mat, 1.0);
    p.grad_wc.assign(mat, 1.0);
    p.grad_b.assign(vocab, 1.0);
    p.grad_bc.assign(vocab, 1.0);
    return p;
}

namespace {

constexpr char kParamsMagic[4] = {'G', 'K', 'P', 'M'};

void write_block(File& f, std::span<const double> v) {
    f.write(v.data(), v.size() * sizeof(double));
}

void read_block(File& f, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    f.read_exact(v.data(), n * sizeof(double));
}

} // namespace

void ModelParams::save(const std::filesystem::path& path) const {
    File f(path, "wb");
    f.write(kParamsMagic, 4);
    const std::uint32_t version = 1;
    f.write(&version, 4);
    f.write(&vocab, 8);
    f.write(&dim, 4);
    write_block(f, w);
    write_block(f, wc);
    write_block(f, b);
    write_block(f, bc);
    write_block(f, grad_w);
    write_block(f, grad_wc);
    write_block(f, grad_b);
    write_block(f, grad_bc);
    f.close();
}

ModelParams ModelParams::load(const std::filesystem::path& path) {
    File f(path, "rb");
    char magic[4];
    f.read_exact(magic, 4);
    if (std::memcmp(magic, kParamsMagic, 4) != 0) {
        throw IoError("'" + path.string() + "' is not a model parameter file");
    }
    std::uint32_t version = 0;
    f.read_exact(&version, 4);
    if (version != 1) {
        throw IoError("unsupported parameter file version " + std::to_string(version));
    }
    ModelParams p;
    f.read_exact(&p.vocab, 8);
    f.read_exact(&p.dim, 4);
    const std::size_t mat = static_cast<std::size_t>(p.vocab) * p.dim;
    read_block(f, p.w, mat);
    read_block(f, p.wc, mat);
    read_block(f, p.b, p.vocab);
    read_block(f, p.bc, p.vocab);
    read_block(f, p.grad_w, mat);
    read_block(f, p.grad_wc, mat);
    read_block(f, p.grad_b, p.vocab);
    read_block(f, p.grad_bc, p.vocab);
    return p;
}

double weight(double x, double alpha, double xmax) {
    if (!(x > 0.0)) throw ValidationError("cooccurrence weight requires x > 0");
    if (x >= xmax) return 1.0;
    return std::pow(x / xmax, alpha);
}

namespace {

inline double dot(const double* a, const double* b, std::uint32_t d) {
    double s = 0.0;
    for (std::uint32_t k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

inline void check_record(const ModelParams& params, const CoocRecord& rec) {
    if (rec.row >= params.vocab || rec.col >= params.vocab) {
        throw ValidationError("record index (" + std::to_string(rec.row) + ", " +
                              std::to_string(rec.col) + ") outside vocabulary of size " +
                              std::to_string(params.vocab));
    }
    if (!(rec.value > 0.0)) {
        throw ValidationError("record (" + std::to_string(rec.row) + ", " +
                              std::to_string(rec.col) + ") has non-positive value");
    }
}

} // namespace

double example_cost(const ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg) {
    check_record(params, rec);
    const double* wi = params.w.data() + std::size_t(rec.row) * params.dim;
    const double* wj = params.wc.data() + std::size_t(rec.col) * params.dim;
    const double r = dot(wi, wj, params.dim) + params.b[rec.row] + params.bc[rec.col] -
                     std::log(rec.value);
    const double f = weight(rec.value, cfg.alpha, cfg.xmax);
    const double cost = f * r * r;
    if (!std::isfinite(cost)) {
        throw TrainingError("non-finite cost at record (" + std::to_string(rec.row) + ", " +
                            std::to_string(rec.col) + ")");
    }
    return cost;
}

CostGradients example_cost_gradients(const ModelParams& params, const CoocRecord& rec,
                                     const TrainConfig& cfg) {
    check_record(params, rec);
    const std::uint32_t d = params.dim;
    const double* wi = params.w.data() + std::size_t(rec.row) * d;
    const double* wj = params.wc.data() + std::size_t(rec.col) * d;
    const double r = dot(wi, wj, d) + params.b[rec.row] + params.bc[rec.col] -
                     std::log(rec.value);
    const double f = weight(rec.value, cfg.alpha, cfg.xmax);
    CostGradients g;
    g.cost = f * r * r;
    g.d_w.resize(d);
    g.d_wc.resize(d);
    const double two_fr = 2.0 * f * r;
    for (std::uint32_t k = 0; k < d; ++k) {
        g.d_w[k] = two_fr * wj[k];
        g.d_wc[k] = two_fr * wi[k];
    }
    g.d_b = two_fr;
    g.d_bc = two_fr;
    return g;
}

namespace {

// Shared by the sequential API and the hogwild workers. Scratch buffers
// avoid per-record allocation.
struct StepScratch {
    std::vector<double> upd_i;
    std::vector<double> upd_j;
    std::vector<double> gsq_i;
    std::vector<double> gsq_j;
};

StepResult step_impl(ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg,
                     StepScratch& scratch) {
    const std::uint32_t d = params.dim;
    double* wi = params.w.data() + std::size_t(rec.row) * d;
    double* wj = params.wc.data() + std::size_t(rec.col) * d;
    double* gi = params.grad_w.data() + std::size_t(rec.row) * d;
    double* gj = params.grad_wc.data() + std::size_t(rec.col) * d;

    const double r = dot(wi, wj, d) + params.b[rec.row] + params.bc[rec.col] -
                     std::log(rec.value);
    const double f = weight(rec.value, cfg.alpha, cfg.xmax);
    const double g = f * r;
    const double cost = f * r * r;
    if (!std::isfinite(r) || !std::isfinite(g)) return {cost, true};

    scratch.upd_i.resize(d);
    scratch.upd_j.resize(d);
    scratch.gsq_i.resize(d);
    scratch.gsq_j.resize(d);

    double check = 0.0;
    for (std::uint32_t k = 0; k < d; ++k) {
        const double grad_i = g * wj[k];
        const double grad_j = g * wi[k];
        scratch.upd_i[k] = cfg.eta * grad_i / std::sqrt(gi[k]);
        scratch.upd_j[k] = cfg.eta * grad_j / std::sqrt(gj[k]);
        scratch.gsq_i[k] = grad_i * grad_i;
        scratch.gsq_j[k] = grad_j * grad_j;
        check += scratch.upd_i[k] + scratch.upd_j[k] + scratch.gsq_i[k] + scratch.gsq_j[k];
    }
    const double upd_b = cfg.eta * g / std::sqrt(params.grad_b[rec.row]);
    const double upd_bc = cfg.eta * g / std::sqrt(params.grad_bc[rec.col]);
    check += upd_b + upd_bc + g * g;
    if (!std::isfinite(check)) return {cost, true};

    for (std::uint32_t k = 0; k < d; ++k) {
        wi[k] -= scratch.upd_i[k];
        wj[k] -= scratch.upd_j[k];
        gi[k] += scratch.gsq_i[k];
        gj[k] += scratch.gsq_j[k];
    }
    params.b[rec.row] -= upd_b;
    params.bc[rec.col] -= upd_bc;
    params.grad_b[rec.row] += g * g;
    params.grad_bc[rec.col] += g * g;
    return {cost, false};
}

} // namespace

StepResult adagrad_step(ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg) {
    check_record(params, rec);
    StepScratch scratch;
    return step_impl(params, rec, cfg, scratch);
}

FileRecordStore::FileRecordStore(std::filesystem::path path)
    : path_(std::move(path)), count_(RecordReader::count_records(path_)) {}

namespace {

class FileSource final : public RecordSource {
public:
    FileSource(const std::filesystem::path& path, std::uint64_t first, std::uint64_t last)
        : reader_(path, first, last) {}
    std::size_t read(std::span<CoocRecord> out) override { return reader_.read(out); }

private:
    RecordReader reader_;
};

class MemorySource final : public RecordSource {
public:
    MemorySource(std::span<const CoocRecord> records) : records_(records) {}
    std::size_t read(std::span<CoocRecord> out) override {
        const std::size_t take = std::min(out.size(), records_.size() - pos_);
        std::memcpy(out.data(), records_.data() + pos_, take * sizeof(CoocRecord));
        pos_ += take;
        return take;
    }

private:
    std::span<const CoocRecord> records_;
    std::size_t pos_ = 0;
};

} // namespace

std::unique_ptr<RecordSource> FileRecordStore::open(std::uint64_t first,
                                                    std::uint64_t last) const {
    return std::make_unique<FileSource>(path_, first, last);
}

std::unique_ptr<RecordSource> MemoryRecordStore::open(std::uint64_t first,
                                                      std::uint64_t last) const {
    const std::uint64_t n = records_.size();
    first = std::min(first, n);
    last = std::min(last, n);
    if (first > last) first = last;
    return std::make_unique<MemorySource>(
        std::span<const CoocRecord>(records_.data() + first, last - first));
}

TrainResult train(const RecordStore& records, std::uint64_t vocab_size, const TrainConfig& cfg) {
    cfg.validate();
    const std::uint64_t total = records.count();
    if (total == 0) throw ValidationError("training requires a nonempty record stream");

    TrainResult result;
    result.params = ModelParams::init(vocab_size, cfg.dim, cfg.seed);
    ModelParams& params = result.params;

    const std::uint32_t epochs = cfg.effective_epochs();
    const std::uint32_t threads =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg.threads, total));

    for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
        std::vector<double> cost_sums(threads, 0.0);
        std::vector<std::uint64_t> counted(threads, 0);
        std::vector<std::uint64_t> skipped(threads, 0);

        auto worker = [&](std::uint32_t t) {
            const std::uint64_t first = total * t / threads;
            const std::uint64_t last = total * (t + 1) / threads;
            auto source = records.open(first, last);
            StepScratch scratch;
            std::vector<CoocRecord> buf(4096);
            std::size_t got;
            while ((got = source->read(buf)) > 0) {
                for (std::size_t k = 0; k < got; ++k) {
                    check_record(params, buf[k]);
                    StepResult sr = step_impl(params, buf[k], cfg, scratch);
                    if (sr.skipped) {
                        ++skipped[t];
                    } else {
                        cost_sums[t] += sr.cost;
                        ++counted[t];
                    }
                }
            }
        };

        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
            for (auto& th : pool) th.join();
        }

        double cost_sum = 0.0;
        std::uint64_t n_counted = 0;
        std::uint64_t n_skipped = 0;
        for (std::uint32_t t = 0; t < threads; ++t) {
            cost_sum += cost_sums[t];
            n_counted += counted[t];
            n_skipped += skipped[t];
        }
        result.processed += n_counted;
        result.skipped += n_skipped;
        result.epoch_mean_cost.push_back(n_counted > 0 ? cost_sum / double(n_counted)
                                                       : std::numeric_limits<double>::quiet_NaN());

        const std::uint64_t seen = result.processed + result.skipped;
        if (seen > 0 && double(result.skipped) > cfg.max_skip_fraction * double(seen)) {
            throw TrainingError("aborted: " + std::to_string(result.skipped) + " of " +
                                std::to_string(seen) + " records skipped (limit " +
                                std::to_string(cfg.max_skip_fraction * 100.0) + "%)");
        }
    }
    return result;
}

} // namespace glovekit
