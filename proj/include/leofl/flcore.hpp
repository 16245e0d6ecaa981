#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "leofl/contact.hpp"
#include "leofl/params.hpp"
#include "leofl/strategies.hpp"

namespace leofl {

// Raised when an aggregation leaves the global model non-finite.
struct DivergenceError : std::runtime_error {
  std::int64_t round;
  explicit DivergenceError(std::int64_t r)
      : std::runtime_error("divergence: non-finite global model after aggregating round " +
                           std::to_string(r)),
        round(r) {}
};

struct ServerState {
  ModelParams global_model;
  std::int64_t round_index = 0;  // completed aggregations so far
  ModelParams buffer_sum;        // importance-weighted sum of buffered updates
  double weight_sum = 0.0;
  int arrivals_in_round = 0;
  int buffer_size = 1;  // updates needed to close a round
  double eta_g = 0.1;
};

enum class FirstVisitMode {
  kBootstrap,    // a client's first update falls back to the plain delta
  kPaperLiteral  // missing previous end model is treated as the zero vector
};

FirstVisitMode parse_first_visit_mode(const std::string& name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kFedGsm;
  FirstVisitMode first_visit = FirstVisitMode::kBootstrap;
  double fedasync_alpha0 = 0.6;
  double fedasync_poly_a = 0.5;
};

struct ClientState {
  int satellite_id = -1;
  double importance = 0.0;  // p_n, the client's share of the training data
  std::vector<std::int64_t> participation_rounds;  // server round at each download
  std::int64_t participation_count = 0;
  ModelParams start_model;                    // model received at the latest download
  std::optional<ModelParams> end_model_prev;  // local end model of the latest training
  std::optional<ModelParams> pending_update;  // payload awaiting the next upload
};

struct StalenessRecord {
  int satellite_id = -1;
  std::int64_t round = 0;      // server round at this download
  std::int64_t staleness = -1; // rounds since the previous download; -1 on the first
};

struct AggregationRecord {
  std::int64_t round_closed = 0;
  double weight_sum = 0.0;        // total importance that entered the round
  double model_delta_norm = 0.0;  // L2 norm of the global model step
};

// Runs local training from a start model; receives the client so it can
// derive per-client, per-participation behaviour (data shard, seeds,
// learning-rate decay).
using TrainFn = std::function<ModelParams(const ModelParams& start, const ClientState& client)>;

// Upload half of a contact: fold the client's pending update into the
// buffer and, when the buffer fills (or on every arrival for fedasync),
// advance the global model. No-op when the client has nothing to send.
std::optional<AggregationRecord> server_ingest_update(ServerState& server, ClientState& client,
                                                      const StrategyConfig& strategy);

// Download half of a contact: hand the current global model to the client
// (which trains and queues its next update) and record the staleness of
// this participation.
StalenessRecord server_deliver_model(ServerState& server, ClientState& client,
                                     const StrategyConfig& strategy, const TrainFn& trainer);

struct VisitOutcome {
  std::optional<AggregationRecord> aggregation;
  StalenessRecord staleness;
};

// One full contact: upload, then download, in that order, so the client
// that closes a round leaves with the freshly aggregated model.
VisitOutcome server_on_visit(ServerState& server, ClientState& client,
                             const StrategyConfig& strategy, const TrainFn& trainer);

// Client side of a download: store the received model, train, and queue
// the strategy's update payload for the next contact.
void client_on_visit(ClientState& client, const ModelParams& received_global,
                     std::int64_t current_round, const StrategyConfig& strategy,
                     const TrainFn& trainer);

// Staleness of the client's most recent participation. Undefined (throws)
// before the second participation.
std::int64_t staleness_of_last(const ClientState& client);

struct ScheduleHooks {
  // Called after each processed visit with the server round at that point.
  std::function<void(const Visit&, std::int64_t round_index, std::int64_t staleness)> on_visit;
  // Called after each completed aggregation.
  std::function<void(double time_s, const AggregationRecord&)> on_aggregation;
};

// Replays the visit stream through the asynchronous protocol.
void run_async_schedule(ServerState& server, std::vector<ClientState>& clients,
                        std::span<const Visit> visits, const StrategyConfig& strategy,
                        const TrainFn& trainer, const ScheduleHooks& hooks);

// Synchronous baseline on the same visit stream: each client receives the
// round's model at its first contact, reports its trained model at the
// next, and the round closes once every client has reported. Returns true
// when the stream ended mid-round (truncated final round).
bool run_fedavg_schedule(ServerState& server, std::vector<ClientState>& clients,
                         std::span<const Visit> visits, const TrainFn& trainer,
                         const ScheduleHooks& hooks);

}  // namespace leofl
