#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "leofl/params.hpp"

namespace leofl {

enum class StrategyKind { kFedGsm, kFedBuff, kFedSat, kFedAsync, kFedAvg };

StrategyKind parse_strategy(const std::string& name);
std::string to_string(StrategyKind kind);

// Staleness-compensated client update: 2*end_cur - start_cur - end_prev,
// computed coordinatewise as (end_cur - start_cur) + (end_cur - end_prev)
// so it is bit-identical to fedbuff_update + fedsat_update.
ModelParams fedgsm_update(const ModelParams& end_cur, const ModelParams& start_cur,
                          const ModelParams& end_prev);

// Plain buffered-update delta: end_cur - start_cur.
ModelParams fedbuff_update(const ModelParams& end_cur, const ModelParams& start_cur);

// Difference of the client's two most recent local end models.
ModelParams fedsat_update(const ModelParams& end_cur, const ModelParams& end_prev);

// Staleness-damped model mix: (1 - alpha) * global + alpha * local_end with
// alpha = alpha0 * staleness^(-poly_a). Requires staleness >= 1.
ModelParams fedasync_mix(const ModelParams& global_model, const ModelParams& local_end,
                         std::int64_t staleness, double alpha0, double poly_a);

// Importance-weighted average of full models (the synchronous aggregate).
ModelParams weighted_model_average(std::span<const ModelParams> models,
                                   std::span<const double> weights);

}  // namespace leofl
