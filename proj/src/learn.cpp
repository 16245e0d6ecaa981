#include "leofl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace leofl {

namespace {

// Stable softmax of logits in place, returns -log p[target].
double softmax_nll(std::vector<double>& logits, int target) {
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - zmax);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return -std::log(logits[static_cast<std::size_t>(target)]);
}

int argmax_lowest_tie(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return best;
}

void check_spec(const ModelSpec& spec) {
  if (spec.dim < 1 || spec.classes < 2)
    throw std::invalid_argument("model spec needs dim >= 1 and classes >= 2");
  if (spec.kind == ModelKind::kMlp1 && spec.hidden < 1)
    throw std::invalid_argument("mlp1 needs a positive hidden width");
}

void softmax_logits(const ModelSpec& spec, const ModelParams& p, const double* x,
                    std::vector<double>& logits) {
  const int C = spec.classes, D = spec.dim;
  logits.assign(static_cast<std::size_t>(C), 0.0);
  const double* b = p.data() + static_cast<std::size_t>(C) * D;
  for (int c = 0; c < C; ++c) {
    const double* w = p.data() + static_cast<std::size_t>(c) * D;
    double z = b[c];
    for (int j = 0; j < D; ++j) z += w[j] * x[j];
    logits[static_cast<std::size_t>(c)] = z;
  }
}

void mlp_forward(const ModelSpec& spec, const ModelParams& p, const double* x,
                 std::vector<double>& hidden, std::vector<double>& logits) {
  const int C = spec.classes, D = spec.dim, H = spec.hidden;
  const double* w1 = p.data();
  const double* b1 = w1 + static_cast<std::size_t>(H) * D;
  const double* w2 = b1 + H;
  const double* b2 = w2 + static_cast<std::size_t>(C) * H;
  hidden.assign(static_cast<std::size_t>(H), 0.0);
  for (int h = 0; h < H; ++h) {
    const double* row = w1 + static_cast<std::size_t>(h) * D;
    double a = b1[h];
    for (int j = 0; j < D; ++j) a += row[j] * x[j];
    hidden[static_cast<std::size_t>(h)] = std::tanh(a);
  }
  logits.assign(static_cast<std::size_t>(C), 0.0);
  for (int c = 0; c < C; ++c) {
    const double* row = w2 + static_cast<std::size_t>(c) * H;
    double z = b2[c];
    for (int h = 0; h < H; ++h) z += row[h] * hidden[static_cast<std::size_t>(h)];
    logits[static_cast<std::size_t>(c)] = z;
  }
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "softmax_linear") return ModelKind::kSoftmaxLinear;
  if (name == "mlp1") return ModelKind::kMlp1;
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected softmax_linear or mlp1)");
}

int ModelSpec::param_count() const {
  if (kind == ModelKind::kSoftmaxLinear) return classes * dim + classes;
  return dim * hidden + hidden + hidden * classes + classes;
}

Dataset gen_blobs(int n_samples, int classes, int dim, double spread, std::uint64_t seed) {
  if (classes < 2) throw std::invalid_argument("gen_blobs: need at least 2 classes");
  if (dim < 2) throw std::invalid_argument("gen_blobs: need dim >= 2");
  if (n_samples < classes)
    throw std::invalid_argument("gen_blobs: need at least one sample per class");
  if (spread < 0.0) throw std::invalid_argument("gen_blobs: spread must be non-negative");

  Dataset ds;
  ds.n_samples = n_samples;
  ds.dim = dim;
  ds.num_classes = classes;
  ds.features.resize(static_cast<std::size_t>(n_samples) * dim);
  ds.labels.resize(static_cast<std::size_t>(n_samples));

  Rng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    const int c = i % classes;
    ds.labels[static_cast<std::size_t>(i)] = c;
    double* row = ds.features.data() + static_cast<std::size_t>(i) * dim;
    for (int j = 0; j < dim; ++j) row[j] = spread * rng.normal();
    row[c % dim] += 1.0 + static_cast<double>(c / dim);
  }
  return ds;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("split_train_test: test_fraction must lie in [0, 1)");
  const int n_test = static_cast<int>(std::llround(ds.n_samples * test_fraction));

  std::vector<int> idx(static_cast<std::size_t>(ds.n_samples));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  auto materialize = [&](std::span<const int> rows) {
    Dataset out;
    out.dim = ds.dim;
    out.num_classes = ds.num_classes;
    out.n_samples = static_cast<int>(rows.size());
    out.features.reserve(rows.size() * static_cast<std::size_t>(ds.dim));
    out.labels.reserve(rows.size());
    for (int i : rows) {
      const double* r = ds.row(i);
      out.features.insert(out.features.end(), r, r + ds.dim);
      out.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
    }
    return out;
  };

  std::span<const int> all(idx);
  return {materialize(all.subspan(static_cast<std::size_t>(n_test))),
          materialize(all.first(static_cast<std::size_t>(n_test)))};
}

Partition partition_iid(const Dataset& ds, int n_clients, std::uint64_t seed) {
  if (n_clients < 1) throw std::invalid_argument("partition_iid: need at least one client");
  if (n_clients > ds.n_samples)
    throw std::invalid_argument("partition_iid: more clients than samples");

  std::vector<int> idx(static_cast<std::size_t>(ds.n_samples));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  const int quota = ds.n_samples / n_clients;  // excess trimmed off the end
  Partition part;
  part.assignments.resize(static_cast<std::size_t>(n_clients));
  for (int c = 0; c < n_clients; ++c)
    part.assignments[static_cast<std::size_t>(c)].assign(
        idx.begin() + static_cast<std::ptrdiff_t>(c) * quota,
        idx.begin() + static_cast<std::ptrdiff_t>(c + 1) * quota);
  return part;
}

Partition partition_dirichlet(const Dataset& ds, int n_clients, double beta,
                              std::uint64_t seed) {
  if (n_clients < 1)
    throw std::invalid_argument("partition_dirichlet: need at least one client");
  if (n_clients > ds.n_samples)
    throw std::invalid_argument("partition_dirichlet: more clients than samples");
  if (!(beta > 0.0))
    throw std::invalid_argument("partition_dirichlet: beta must be positive");

  const int C = ds.num_classes;
  std::vector<std::vector<int>> pools(static_cast<std::size_t>(C));
  for (int i = 0; i < ds.n_samples; ++i)
    pools[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);

  Rng rng(seed);
  for (auto& pool : pools) rng.shuffle(pool);

  const int quota = ds.n_samples / n_clients;
  Partition part;
  part.assignments.resize(static_cast<std::size_t>(n_clients));
  for (int n = 0; n < n_clients; ++n) {
    const std::vector<double> q = rng.dirichlet(beta, C);
    auto& shard = part.assignments[static_cast<std::size_t>(n)];
    shard.reserve(static_cast<std::size_t>(quota));
    for (int s = 0; s < quota; ++s) {
      int c = rng.categorical(q);
      if (pools[static_cast<std::size_t>(c)].empty()) {
        // deterministic fallback: largest remaining pool, lowest class on ties
        int best = -1;
        std::size_t best_size = 0;
        for (int k = 0; k < C; ++k) {
          const std::size_t sz = pools[static_cast<std::size_t>(k)].size();
          if (sz > best_size) {
            best = k;
            best_size = sz;
          }
        }
        c = best;
      }
      auto& pool = pools[static_cast<std::size_t>(c)];
      shard.push_back(pool.back());
      pool.pop_back();
    }
  }
  return part;
}

double loss_and_grad(const ModelSpec& spec, const ModelParams& params, const Dataset& ds,
                     std::span<const int> batch, ModelParams& grad_out) {
  check_spec(spec);
  if (params.size() != static_cast<std::size_t>(spec.param_count()))
    throw std::invalid_argument("loss_and_grad: parameter count mismatch");
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");

  grad_out.assign(params.size(), 0.0);
  const int C = spec.classes, D = spec.dim;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> logits, hidden;

  if (spec.kind == ModelKind::kSoftmaxLinear) {
    double* gw = grad_out.data();
    double* gb = grad_out.data() + static_cast<std::size_t>(C) * D;
    for (int i : batch) {
      const double* x = ds.row(i);
      const int y = ds.labels[static_cast<std::size_t>(i)];
      softmax_logits(spec, params, x, logits);
      loss += softmax_nll(logits, y) * inv_b;
      for (int c = 0; c < C; ++c) {
        const double dz = (logits[static_cast<std::size_t>(c)] - (c == y ? 1.0 : 0.0)) * inv_b;
        double* gr = gw + static_cast<std::size_t>(c) * D;
        for (int j = 0; j < D; ++j) gr[j] += dz * x[j];
        gb[c] += dz;
      }
    }
    return loss;
  }

  const int H = spec.hidden;
  const double* w2 = params.data() + static_cast<std::size_t>(H) * D + H;
  double* gw1 = grad_out.data();
  double* gb1 = gw1 + static_cast<std::size_t>(H) * D;
  double* gw2 = gb1 + H;
  double* gb2 = gw2 + static_cast<std::size_t>(C) * H;
  std::vector<double> dhidden(static_cast<std::size_t>(H));
  for (int i : batch) {
    const double* x = ds.row(i);
    const int y = ds.labels[static_cast<std::size_t>(i)];
    mlp_forward(spec, params, x, hidden, logits);
    loss += softmax_nll(logits, y) * inv_b;
    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (int c = 0; c < C; ++c) {
      const double dz = (logits[static_cast<std::size_t>(c)] - (c == y ? 1.0 : 0.0)) * inv_b;
      const double* row = w2 + static_cast<std::size_t>(c) * H;
      double* gr = gw2 + static_cast<std::size_t>(c) * H;
      for (int h = 0; h < H; ++h) {
        gr[h] += dz * hidden[static_cast<std::size_t>(h)];
        dhidden[static_cast<std::size_t>(h)] += dz * row[h];
      }
      gb2[c] += dz;
    }
    for (int h = 0; h < H; ++h) {
      const double hv = hidden[static_cast<std::size_t>(h)];
      const double da = dhidden[static_cast<std::size_t>(h)] * (1.0 - hv * hv);
      double* gr = gw1 + static_cast<std::size_t>(h) * D;
      for (int j = 0; j < D; ++j) gr[j] += da * x[j];
      gb1[h] += da;
    }
  }
  return loss;
}

ModelParams local_sgd(const ModelParams& start, const Dataset& ds, std::span<const int> shard,
                      const TrainerConfig& cfg, const ModelSpec& spec,
                      std::int64_t round_counter, Rng& rng) {
  if (cfg.epochs < 0) throw std::invalid_argument("local_sgd: epochs must be non-negative");
  if (cfg.epochs == 0) return start;
  if (shard.empty()) throw std::invalid_argument("local_sgd: empty shard");
  if (cfg.batch_size < 1) throw std::invalid_argument("local_sgd: batch_size must be positive");
  if (round_counter < 0) throw std::invalid_argument("local_sgd: negative round counter");

  const double eta = cfg.eta_l0 * std::pow(cfg.lr_decay, static_cast<double>(round_counter));
  ModelParams params = start;
  ModelParams grad;
  std::vector<int> order(shard.begin(), shard.end());
  const std::size_t b = static_cast<std::size_t>(cfg.batch_size);
  const bool full_batch = b >= order.size();

  for (int e = 0; e < cfg.epochs; ++e) {
    if (!full_batch) rng.shuffle(order);
    for (std::size_t lo = 0; lo < order.size(); lo += b) {
      const std::size_t hi = std::min(lo + b, order.size());
      const double loss = loss_and_grad(spec, params, ds,
                                        std::span<const int>(order).subspan(lo, hi - lo), grad);
      if (!std::isfinite(loss))
        throw std::runtime_error("local_sgd: non-finite training loss");
      add_scaled_in_place(params, grad, -eta);
    }
  }
  return params;
}

EvalResult evaluate(const ModelParams& params, const ModelSpec& spec, const Dataset& test) {
  check_spec(spec);
  if (test.n_samples == 0) throw std::invalid_argument("evaluate: empty test set");
  std::vector<double> logits, hidden;
  int correct = 0;
  double loss = 0.0;
  for (int i = 0; i < test.n_samples; ++i) {
    const double* x = test.row(i);
    if (spec.kind == ModelKind::kSoftmaxLinear)
      softmax_logits(spec, params, x, logits);
    else
      mlp_forward(spec, params, x, hidden, logits);
    if (argmax_lowest_tie(logits) == test.labels[static_cast<std::size_t>(i)]) ++correct;
    loss += softmax_nll(logits, test.labels[static_cast<std::size_t>(i)]);
  }
  return {static_cast<double>(correct) / test.n_samples, loss / test.n_samples};
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  ModelParams p(static_cast<std::size_t>(spec.param_count()), 0.0);
  Rng rng(seed);
  auto fill_uniform = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) p[i] = rng.uniform_in(-0.05, 0.05);
  };
  const auto D = static_cast<std::size_t>(spec.dim);
  const auto C = static_cast<std::size_t>(spec.classes);
  if (spec.kind == ModelKind::kSoftmaxLinear) {
    fill_uniform(0, C * D);  // biases stay zero
  } else {
    const auto H = static_cast<std::size_t>(spec.hidden);
    fill_uniform(0, H * D);
    fill_uniform(H * D + H, H * D + H + C * H);
  }
  return p;
}

}  // namespace leofl
