#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leofl/params.hpp"
#include "leofl/rng.hpp"

namespace leofl {

// Dense classification dataset, features stored row-major.
struct Dataset {
  std::vector<double> features;  // n_samples * dim
  std::vector<int> labels;       // each in [0, num_classes)
  int n_samples = 0;
  int dim = 0;
  int num_classes = 0;

  const double* row(int i) const {
    return features.data() + static_cast<std::size_t>(i) * dim;
  }
};

// Per-satellite index shards into a dataset.
struct Partition {
  std::vector<std::vector<int>> assignments;
};

enum class ModelKind { kSoftmaxLinear, kMlp1 };

ModelKind parse_model_kind(const std::string& name);

// Parameter layout: softmax_linear is [W (classes x dim), b (classes)];
// mlp1 is [W1 (hidden x dim), b1 (hidden), W2 (classes x hidden),
// b2 (classes)] with tanh activation.
struct ModelSpec {
  ModelKind kind = ModelKind::kSoftmaxLinear;
  int dim = 0;
  int classes = 0;
  int hidden = 0;  // used by mlp1 only

  int param_count() const;
};

struct TrainerConfig {
  int epochs = 5;
  int batch_size = 10;
  double eta_l0 = 0.1;
  double lr_decay = 0.998;
};

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
};

// Gaussian class blobs: class c is centered on a deterministic lattice
// point (coordinate c mod dim raised to 1 + floor(c/dim), rest zero), so
// classes sharing an axis sit exactly one unit apart; labels cycle
// 0..classes-1. spread scales the isotropic noise around each center.
Dataset gen_blobs(int n_samples, int classes, int dim, double spread, std::uint64_t seed);

// Splits off a test set of round(n * test_fraction) samples, chosen by a
// seeded shuffle; returns {train, test}.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

// Seeded shuffle, trimmed to a multiple of n_clients, equal contiguous slices.
Partition partition_iid(const Dataset& ds, int n_clients, std::uint64_t seed);

// Label-skewed split: every client keeps the exact quota n/n_clients but
// draws its class mix from a Dirichlet(beta) distribution, falling back to
// the largest remaining class pool (lowest class index on ties) once a
// drawn class is exhausted.
Partition partition_dirichlet(const Dataset& ds, int n_clients, double beta,
                              std::uint64_t seed);

// Mean cross-entropy over the batch; writes the analytic gradient into
// grad_out (resized to match params).
double loss_and_grad(const ModelSpec& spec, const ModelParams& params, const Dataset& ds,
                     std::span<const int> batch, ModelParams& grad_out);

// Minibatch SGD: epochs passes over the shard, a seeded reshuffle per epoch
// (skipped when one batch covers the whole shard, which makes the result
// seed-independent), the last short batch kept, learning rate
// eta_l0 * lr_decay^round_counter. Throws on non-finite loss.
ModelParams local_sgd(const ModelParams& start, const Dataset& ds, std::span<const int> shard,
                      const TrainerConfig& cfg, const ModelSpec& spec,
                      std::int64_t round_counter, Rng& rng);

// Accuracy (argmax, ties to the lowest class index) and mean loss.
EvalResult evaluate(const ModelParams& params, const ModelSpec& spec, const Dataset& test);

// Weights uniform in [-0.05, 0.05], biases zero.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

}  // namespace leofl
