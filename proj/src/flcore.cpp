#include "leofl/flcore.hpp"

#include <algorithm>
#include <cmath>

namespace leofl {

namespace {

ModelParams make_client_update(const StrategyConfig& strategy, const ModelParams& end_cur,
                               const ModelParams& start_cur,
                               const std::optional<ModelParams>& end_prev) {
  switch (strategy.kind) {
    case StrategyKind::kFedBuff:
      return fedbuff_update(end_cur, start_cur);
    case StrategyKind::kFedGsm:
      if (end_prev) return fedgsm_update(end_cur, start_cur, *end_prev);
      if (strategy.first_visit == FirstVisitMode::kPaperLiteral)
        return fedgsm_update(end_cur, start_cur, zeros_like(end_cur));
      return fedbuff_update(end_cur, start_cur);
    case StrategyKind::kFedSat:
      if (end_prev) return fedsat_update(end_cur, *end_prev);
      if (strategy.first_visit == FirstVisitMode::kPaperLiteral)
        return fedsat_update(end_cur, zeros_like(end_cur));
      return fedbuff_update(end_cur, start_cur);
    case StrategyKind::kFedAsync:
    case StrategyKind::kFedAvg:
      // These exchange full models; the server side decides how to use them.
      return end_cur;
  }
  throw std::logic_error("make_client_update: bad StrategyKind");
}

}  // namespace

FirstVisitMode parse_first_visit_mode(const std::string& name) {
  if (name == "bootstrap") return FirstVisitMode::kBootstrap;
  if (name == "paper_literal") return FirstVisitMode::kPaperLiteral;
  throw std::invalid_argument("unknown first_visit_mode '" + name +
                              "' (expected bootstrap or paper_literal)");
}

std::optional<AggregationRecord> server_ingest_update(ServerState& server, ClientState& client,
                                                      const StrategyConfig& strategy) {
  if (!client.pending_update) return std::nullopt;

  if (strategy.kind == StrategyKind::kFedAsync) {
    // Applied immediately; the arrival itself advances the round counter,
    // so this update's staleness counts the round it lands in.
    const std::int64_t tau = server.round_index + 1 - client.participation_rounds.back();
    ModelParams mixed = fedasync_mix(server.global_model, *client.pending_update, tau,
                                     strategy.fedasync_alpha0, strategy.fedasync_poly_a);
    const double delta = l2_distance(mixed, server.global_model);
    server.global_model = std::move(mixed);
    client.pending_update.reset();
    const AggregationRecord rec{server.round_index, 1.0, delta};
    server.round_index += 1;
    if (!all_finite(server.global_model)) throw DivergenceError(rec.round_closed);
    return rec;
  }

  add_scaled_in_place(server.buffer_sum, *client.pending_update, client.importance);
  server.weight_sum += client.importance;
  server.arrivals_in_round += 1;
  client.pending_update.reset();
  if (server.arrivals_in_round < server.buffer_size) return std::nullopt;

  const double scale = server.eta_g / server.weight_sum;
  double delta_sq = 0.0;
  for (std::size_t i = 0; i < server.global_model.size(); ++i) {
    const double d = scale * server.buffer_sum[i];
    server.global_model[i] += d;
    delta_sq += d * d;
  }
  const AggregationRecord rec{server.round_index, server.weight_sum, std::sqrt(delta_sq)};
  std::fill(server.buffer_sum.begin(), server.buffer_sum.end(), 0.0);
  server.weight_sum = 0.0;
  server.arrivals_in_round = 0;
  server.round_index += 1;
  if (!all_finite(server.global_model)) throw DivergenceError(rec.round_closed);
  return rec;
}

void client_on_visit(ClientState& client, const ModelParams& received_global,
                     std::int64_t current_round, const StrategyConfig& strategy,
                     const TrainFn& trainer) {
  if (!all_finite(received_global))
    throw std::invalid_argument("client_on_visit: received a non-finite global model");
  client.start_model = received_global;
  client.participation_rounds.push_back(current_round);
  client.participation_count += 1;
  ModelParams end_cur = trainer(client.start_model, client);
  if (!all_finite(end_cur))
    throw std::runtime_error("client_on_visit: local training returned non-finite parameters");
  client.pending_update =
      make_client_update(strategy, end_cur, client.start_model, client.end_model_prev);
  client.end_model_prev = std::move(end_cur);
}

StalenessRecord server_deliver_model(ServerState& server, ClientState& client,
                                     const StrategyConfig& strategy, const TrainFn& trainer) {
  client_on_visit(client, server.global_model, server.round_index, strategy, trainer);
  const auto& r = client.participation_rounds;
  StalenessRecord rec;
  rec.satellite_id = client.satellite_id;
  rec.round = r.back();
  rec.staleness = r.size() >= 2 ? r[r.size() - 1] - r[r.size() - 2] : -1;
  return rec;
}

VisitOutcome server_on_visit(ServerState& server, ClientState& client,
                             const StrategyConfig& strategy, const TrainFn& trainer) {
  VisitOutcome out;
  out.aggregation = server_ingest_update(server, client, strategy);
  out.staleness = server_deliver_model(server, client, strategy, trainer);
  return out;
}

std::int64_t staleness_of_last(const ClientState& client) {
  const auto& r = client.participation_rounds;
  if (r.size() < 2)
    throw std::logic_error("staleness undefined before the second participation");
  return r[r.size() - 1] - r[r.size() - 2];
}

void run_async_schedule(ServerState& server, std::vector<ClientState>& clients,
                        std::span<const Visit> visits, const StrategyConfig& strategy,
                        const TrainFn& trainer, const ScheduleHooks& hooks) {
  for (const Visit& v : visits) {
    ClientState& client = clients.at(static_cast<std::size_t>(v.satellite_id));
    const VisitOutcome out = server_on_visit(server, client, strategy, trainer);
    if (hooks.on_visit) hooks.on_visit(v, server.round_index, out.staleness.staleness);
    if (out.aggregation && hooks.on_aggregation)
      hooks.on_aggregation(v.time_s, *out.aggregation);
  }
}

bool run_fedavg_schedule(ServerState& server, std::vector<ClientState>& clients,
                         std::span<const Visit> visits, const TrainFn& trainer,
                         const ScheduleHooks& hooks) {
  enum class Phase { kAwaitModel, kTrained, kReported };
  const std::size_t n = clients.size();
  std::vector<Phase> phase(n, Phase::kAwaitModel);
  ModelParams report_sum = zeros_like(server.global_model);
  double report_weight = 0.0;
  std::size_t reported = 0;
  const StrategyConfig sync_cfg{StrategyKind::kFedAvg, FirstVisitMode::kBootstrap, 0.0, 0.0};

  for (const Visit& v : visits) {
    const auto idx = static_cast<std::size_t>(v.satellite_id);
    ClientState& client = clients.at(idx);
    switch (phase[idx]) {
      case Phase::kAwaitModel: {
        const StalenessRecord rec = server_deliver_model(server, client, sync_cfg, trainer);
        phase[idx] = Phase::kTrained;
        if (hooks.on_visit) hooks.on_visit(v, server.round_index, rec.staleness);
        break;
      }
      case Phase::kTrained: {
        add_scaled_in_place(report_sum, *client.pending_update, client.importance);
        report_weight += client.importance;
        client.pending_update.reset();
        phase[idx] = Phase::kReported;
        reported += 1;
        if (reported < n) {
          if (hooks.on_visit) hooks.on_visit(v, server.round_index, -1);
          break;
        }
        // Last report: close the round and, since this satellite is still
        // overhead, hand it the fresh model right away.
        double delta_sq = 0.0;
        for (std::size_t i = 0; i < server.global_model.size(); ++i) {
          const double next = report_sum[i] / report_weight;
          const double d = next - server.global_model[i];
          server.global_model[i] = next;
          delta_sq += d * d;
        }
        const AggregationRecord rec{server.round_index, report_weight, std::sqrt(delta_sq)};
        std::fill(report_sum.begin(), report_sum.end(), 0.0);
        report_weight = 0.0;
        reported = 0;
        std::fill(phase.begin(), phase.end(), Phase::kAwaitModel);
        server.round_index += 1;
        if (!all_finite(server.global_model)) throw DivergenceError(rec.round_closed);
        const StalenessRecord srec = server_deliver_model(server, client, sync_cfg, trainer);
        phase[idx] = Phase::kTrained;
        if (hooks.on_visit) hooks.on_visit(v, server.round_index, srec.staleness);
        if (hooks.on_aggregation) hooks.on_aggregation(v.time_s, rec);
        break;
      }
      case Phase::kReported:
        if (hooks.on_visit) hooks.on_visit(v, server.round_index, -1);
        break;
    }
  }
  // Clients that are merely trained-and-waiting are the normal steady state
  // of the pipeline; what counts as truncation is reports that were folded
  // into a round that never closed, or a horizon too short for any round.
  return reported > 0 || server.round_index == 0;
}

}  // namespace leofl
