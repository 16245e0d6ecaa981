#include "leofl/strategies.hpp"

#include <cmath>
#include <stdexcept>

namespace leofl {

StrategyKind parse_strategy(const std::string& name) {
  if (name == "fedgsm") return StrategyKind::kFedGsm;
  if (name == "fedbuff") return StrategyKind::kFedBuff;
  if (name == "fedsat") return StrategyKind::kFedSat;
  if (name == "fedasync") return StrategyKind::kFedAsync;
  if (name == "fedavg") return StrategyKind::kFedAvg;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected fedgsm, fedbuff, fedsat, fedasync or fedavg)");
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kFedGsm: return "fedgsm";
    case StrategyKind::kFedBuff: return "fedbuff";
    case StrategyKind::kFedSat: return "fedsat";
    case StrategyKind::kFedAsync: return "fedasync";
    case StrategyKind::kFedAvg: return "fedavg";
  }
  throw std::logic_error("to_string: bad StrategyKind");
}

ModelParams fedgsm_update(const ModelParams& end_cur, const ModelParams& start_cur,
                          const ModelParams& end_prev) {
  check_same_dim(end_cur, start_cur);
  check_same_dim(end_cur, end_prev);
  ModelParams out(end_cur.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (end_cur[i] - start_cur[i]) + (end_cur[i] - end_prev[i]);
  return out;
}

ModelParams fedbuff_update(const ModelParams& end_cur, const ModelParams& start_cur) {
  check_same_dim(end_cur, start_cur);
  ModelParams out(end_cur.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = end_cur[i] - start_cur[i];
  return out;
}

ModelParams fedsat_update(const ModelParams& end_cur, const ModelParams& end_prev) {
  check_same_dim(end_cur, end_prev);
  ModelParams out(end_cur.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = end_cur[i] - end_prev[i];
  return out;
}

ModelParams fedasync_mix(const ModelParams& global_model, const ModelParams& local_end,
                         std::int64_t staleness, double alpha0, double poly_a) {
  check_same_dim(global_model, local_end);
  if (staleness < 1)
    throw std::invalid_argument("fedasync_mix: staleness must be at least 1");
  if (!(alpha0 > 0.0) || alpha0 > 1.0)
    throw std::invalid_argument("fedasync_mix: alpha0 must lie in (0, 1]");
  if (poly_a < 0.0)
    throw std::invalid_argument("fedasync_mix: poly_a must be non-negative");
  const double alpha = alpha0 * std::pow(static_cast<double>(staleness), -poly_a);
  ModelParams out(global_model.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - alpha) * global_model[i] + alpha * local_end[i];
  return out;
}

ModelParams weighted_model_average(std::span<const ModelParams> models,
                                   std::span<const double> weights) {
  if (models.empty()) throw std::invalid_argument("weighted_model_average: no models");
  if (models.size() != weights.size())
    throw std::invalid_argument("weighted_model_average: weight count mismatch");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("weighted_model_average: weights must be positive");
    wsum += w;
  }
  ModelParams out(models[0].size(), 0.0);
  for (std::size_t m = 0; m < models.size(); ++m)
    add_scaled_in_place(out, models[m], weights[m] / wsum);
  return out;
}

}  // namespace leofl
