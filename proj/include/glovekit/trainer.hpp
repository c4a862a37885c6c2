#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "glovekit/cooccur.hpp"

namespace glovekit {

/// Training hyperparameters. Defaults are the standard profile:
/// eta 0.05, alpha 0.75, xmax 100, seed 2024, epochs 50 below 200
/// dimensions and 100 at 200 and above. wiki_giga_50d() is the variant
/// profile with eta 0.075 and seed 123.
struct TrainConfig {
    std::uint32_t dim = 50;
    double eta = 0.05;
    double alpha = 0.75;
    double xmax = 100.0;
    std::uint32_t epochs = 0; // 0 = default for dim
    std::uint64_t seed = 2024;
    std::uint32_t threads = 1;
    double max_skip_fraction = 0.001;

    static std::uint32_t default_epochs(std::uint32_t dim) { return dim < 200 ? 50 : 100; }
    static TrainConfig wiki_giga_50d();

    std::uint32_t effective_epochs() const { return epochs == 0 ? default_epochs(dim) : epochs; }
    void validate() const;
};

/// Word vectors, context vectors, biases, and the per-coordinate squared
/// gradient accumulators, all 64-bit. Accumulators start at 1.0 so the
/// first step size equals eta and no division by zero can occur.
struct ModelParams {
    std::uint32_t dim = 0;
    std::uint64_t vocab = 0;
    std::vector<double> w;       // vocab x dim, row-major (focus vectors)
    std::vector<double> wc;      // vocab x dim (context vectors)
    std::vector<double> b;       // vocab (focus biases)
    std::vector<double> bc;      // vocab (context biases)
    std::vector<double> grad_w;  // accumulators, same shapes
    std::vector<double> grad_wc;
    std::vector<double> grad_b;
    std::vector<double> grad_bc;

    /// Fills vectors and biases uniformly in [-0.5/dim, +0.5/dim] from the
    /// seed (fill order: w, wc, b, bc); accumulators to 1.0.
    static ModelParams init(std::uint64_t vocab, std::uint32_t dim, std::uint64_t seed);

    std::span<double> w_row(std::uint32_t i) { return {w.data() + std::size_t(i) * dim, dim}; }
    std::span<double> wc_row(std::uint32_t j) { return {wc.data() + std::size_t(j) * dim, dim}; }
    std::span<const double> w_row(std::uint32_t i) const {
        return {w.data() + std::size_t(i) * dim, dim};
    }
    std::span<const double> wc_row(std::uint32_t j) const {
        return {wc.data() + std::size_t(j) * dim, dim};
    }

    void save(const std::filesystem::path& path) const;
    static ModelParams load(const std::filesystem::path& path);
};

/// f(x) = (x/xmax)^alpha for x < xmax, else 1.
double weight(double x, double alpha, double xmax);

/// Weighted squared residual of one record:
/// f(x) * (w_i . wc_j + b_i + bc_j - log x)^2.
double example_cost(const ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg);

/// Analytic gradients of example_cost with respect to all four parameter
/// blocks of the record. Used by the finite-difference checks.
struct CostGradients {
    double cost = 0.0;
    std::vector<double> d_w;  // dim
    std::vector<double> d_wc; // dim
    double d_b = 0.0;
    double d_bc = 0.0;
};
CostGradients example_cost_gradients(const ModelParams& params, const CoocRecord& rec,
                                     const TrainConfig& cfg);

struct StepResult {
    double cost = 0.0; // pre-update example cost
    bool skipped = false;
};

/// One AdaGrad update: residual r, gradient scale g = f(x) * r, per-block
/// gradients g*wc_j, g*w_i, g, g; each coordinate moves by
/// eta * grad / sqrt(G) against old accumulators, then G += grad^2.
/// Gradients use pre-step partner values; a non-finite intermediate skips
/// the record untouched.
StepResult adagrad_step(ModelParams& params, const CoocRecord& rec, const TrainConfig& cfg);

/// Rewindable source of training records.
class RecordSource {
public:
    virtual ~RecordSource() = default;
    virtual std::size_t read(std::span<CoocRecord> out) = 0;
};

class RecordStore {
public:
    virtual ~RecordStore() = default;
    virtual std::uint64_t count() const = 0;
    /// Opens a cursor over records [first, last); cursors are independent,
    /// so hogwild threads can stream disjoint ranges concurrently.
    virtual std::unique_ptr<RecordSource> open(std::uint64_t first, std::uint64_t last) const = 0;
};

class FileRecordStore final : public RecordStore {
public:
    explicit FileRecordStore(std::filesystem::path path);
    std::uint64_t count() const override { return count_; }
    std::unique_ptr<RecordSource> open(std::uint64_t first, std::uint64_t last) const override;

private:
    std::filesystem::path path_;
    std::uint64_t count_;
};

class MemoryRecordStore final : public RecordStore {
public:
    explicit MemoryRecordStore(std::vector<CoocRecord> records)
        : records_(std::move(records)) {}
    std::uint64_t count() const override { return records_.size(); }
    std::unique_ptr<RecordSource> open(std::uint64_t first, std::uint64_t last) const override;

private:
    std::vector<CoocRecord> records_;
};

struct TrainResult {
    ModelParams params;
    std::vector<double> epoch_mean_cost;
    std::uint64_t skipped = 0;
    std::uint64_t processed = 0;
};

/// Runs effective_epochs() passes over the stream in stream order.
/// threads == 1 is bit-reproducible; more threads use unsynchronized
/// (hogwild) updates over contiguous offset ranges. Aborts when skipped
/// records exceed max_skip_fraction of those seen.
TrainResult train(const RecordStore& records, std::uint64_t vocab_size, const TrainConfig& cfg);

} // namespace glovekit
