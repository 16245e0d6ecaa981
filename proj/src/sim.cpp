#include "leofl/sim.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

#include "leofl/flcore.hpp"
#include "leofl/rng.hpp"

namespace leofl {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const char* event_name(MetricsRow::Event e) {
  switch (e) {
    case MetricsRow::Event::kVisit: return "visit";
    case MetricsRow::Event::kAggregate: return "aggregate";
    case MetricsRow::Event::kEval: return "eval";
  }
  return "?";
}

struct MeanStd {
  double mean = -1.0;
  double std = -1.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size() - 1))};
}

}  // namespace

SimResult run_on_schedule(const RunConfig& cfg, const std::vector<Visit>& visits) {
  validate_config(cfg);
  const int n_clients = cfg.n_satellites();
  const ModelSpec mspec = make_model_spec(cfg);
  const TrainerConfig tcfg = make_trainer_config(cfg);

  const Dataset full = gen_blobs(cfg.data.n_samples, cfg.data.classes, cfg.data.dim,
                                 cfg.data.spread, stream_seed(cfg.seed, "data"));
  auto [train, test] =
      split_train_test(full, cfg.data.test_fraction, stream_seed(cfg.seed, "split"));
  const Partition part =
      partition_is_iid(cfg)
          ? partition_iid(train, n_clients, stream_seed(cfg.seed, "partition"))
          : partition_dirichlet(train, n_clients, cfg.data.dirichlet_beta,
                                stream_seed(cfg.seed, "partition"));

  double total = 0.0;
  for (const auto& shard : part.assignments) total += static_cast<double>(shard.size());

  ServerState server;
  server.global_model = init_params(mspec, stream_seed(cfg.seed, "init"));
  server.buffer_sum = zeros_like(server.global_model);
  server.buffer_size = cfg.fl.buffer_size;
  server.eta_g = cfg.fl.eta_g;

  std::vector<ClientState> clients(static_cast<std::size_t>(n_clients));
  for (int n = 0; n < n_clients; ++n) {
    clients[static_cast<std::size_t>(n)].satellite_id = n;
    clients[static_cast<std::size_t>(n)].importance =
        static_cast<double>(part.assignments[static_cast<std::size_t>(n)].size()) / total;
  }

  const StrategyConfig strategy{strategy_kind(cfg), first_visit_mode(cfg),
                                cfg.fl.fedasync_alpha0, cfg.fl.fedasync_poly_a};

  // Each training call draws from its own (satellite, participation)
  // stream, so schedule or epoch changes never leak across clients.
  TrainFn trainer = [&](const ModelParams& start, const ClientState& client) {
    const std::int64_t round_counter = client.participation_count - 1;
    Rng rng(stream_seed(cfg.seed, "train",
                        (static_cast<std::uint64_t>(client.satellite_id) << 32) ^
                            static_cast<std::uint64_t>(round_counter)));
    return local_sgd(start, train, part.assignments[static_cast<std::size_t>(client.satellite_id)],
                     tcfg, mspec, round_counter, rng);
  };

  SimResult result;
  auto eval_now = [&](double t) {
    const EvalResult ev = evaluate(server.global_model, mspec, test);
    result.rows.push_back({t, MetricsRow::Event::kEval, server.round_index, -1, -1,
                           ev.accuracy, ev.loss, -1.0});
    result.final_accuracy = ev.accuracy;
    result.final_loss = ev.loss;
  };
  eval_now(0.0);

  ScheduleHooks hooks;
  hooks.on_visit = [&](const Visit& v, std::int64_t round, std::int64_t staleness) {
    result.rows.push_back({v.time_s, MetricsRow::Event::kVisit, round, v.satellite_id,
                           staleness, -1.0, -1.0, -1.0});
  };
  hooks.on_aggregation = [&](double t, const AggregationRecord& rec) {
    result.rows.push_back({t, MetricsRow::Event::kAggregate, rec.round_closed, -1, -1, -1.0,
                           -1.0, rec.model_delta_norm});
    eval_now(t);
  };

  if (strategy.kind == StrategyKind::kFedAvg) {
    result.truncated = run_fedavg_schedule(server, clients, visits, trainer, hooks);
    if (result.truncated)
      std::cerr << "note: horizon ended mid-round; the unfinished synchronous round was dropped\n";
  } else {
    run_async_schedule(server, clients, visits, strategy, trainer, hooks);
  }
  result.aggregations = server.round_index;
  return result;
}

SimResult run_simulation(const RunConfig& cfg) {
  validate_config(cfg);
  const auto constellation = build_constellation(make_constellation_spec(cfg));
  const GroundStation gs = make_ground_station(cfg);
  const auto windows = contact_windows(constellation, gs, 0.0, cfg.sim.duration_s,
                                       cfg.sim.coarse_step_s, cfg.sim.refine_tol_s);
  return run_on_schedule(cfg, visit_stream(windows));
}

double time_to_target(const std::vector<MetricsRow>& rows, double target_accuracy) {
  for (const MetricsRow& r : rows)
    if (r.event == MetricsRow::Event::kEval && r.test_accuracy >= target_accuracy)
      return r.sim_time_s;
  return -1.0;
}

std::vector<SweepSummaryRow> compare_sweep(const RunConfig& base,
                                           const std::vector<StrategyKind>& strategies,
                                           const std::vector<std::uint64_t>& seeds,
                                           double target_accuracy,
                                           std::vector<std::string>* cell_errors) {
  validate_config(base);
  if (strategies.empty()) throw std::invalid_argument("compare_sweep: no strategies");
  if (seeds.empty()) throw std::invalid_argument("compare_sweep: no seeds");

  const auto constellation = build_constellation(make_constellation_spec(base));
  const GroundStation gs = make_ground_station(base);
  const auto windows = contact_windows(constellation, gs, 0.0, base.sim.duration_s,
                                       base.sim.coarse_step_s, base.sim.refine_tol_s);
  const auto visits = visit_stream(windows);

  std::vector<SweepSummaryRow> table;
  for (StrategyKind kind : strategies) {
    SweepSummaryRow row;
    row.strategy = to_string(kind);
    row.seeds = static_cast<int>(seeds.size());
    std::vector<double> finals, times, aggs;
    for (std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.fl.strategy = to_string(kind);
      cfg.seed = seed;
      try {
        const SimResult r = run_on_schedule(cfg, visits);
        finals.push_back(r.final_accuracy);
        aggs.push_back(static_cast<double>(r.aggregations));
        if (r.truncated) row.truncated_runs += 1;
        const double tts = time_to_target(r.rows, target_accuracy);
        if (tts >= 0.0) {
          times.push_back(tts);
          row.reached_target += 1;
        }
      } catch (const std::exception& e) {
        row.failed_runs += 1;
        if (cell_errors)
          cell_errors->push_back(row.strategy + "/seed " + std::to_string(seed) + ": " + e.what());
      }
    }
    const MeanStd fa = mean_std(finals);
    row.final_acc_mean = fa.mean;
    row.final_acc_std = fa.std;
    const MeanStd tt = mean_std(times);
    row.time_to_target_mean_s = tt.mean;
    row.time_to_target_std_s = tt.std;
    const MeanStd ag = mean_std(aggs);
    row.aggregations_mean = ag.mean;
    table.push_back(row);
  }
  return table;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "sim_time_s,event,round_index,satellite_id,staleness,test_accuracy,test_loss,"
         "global_grad_norm_proxy\n";
  for (const MetricsRow& r : rows)
    out << fixed6(r.sim_time_s) << ',' << event_name(r.event) << ',' << r.round_index << ','
        << r.satellite_id << ',' << r.staleness << ',' << fixed6(r.test_accuracy) << ','
        << fixed6(r.test_loss) << ',' << fixed6(r.global_update_norm) << '\n';
}

void write_windows_csv(std::ostream& out, const std::vector<ContactEvent>& windows) {
  out << "satellite_id,start_s,end_s\n";
  for (const ContactEvent& w : windows)
    out << w.satellite_id << ',' << fixed6(w.start_s) << ',' << fixed6(w.end_s) << '\n';
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "label";
  for (int j = 0; j < ds.dim; ++j) out << ",f" << j;
  out << '\n';
  for (int i = 0; i < ds.n_samples; ++i) {
    out << ds.labels[static_cast<std::size_t>(i)];
    const double* row = ds.row(i);
    for (int j = 0; j < ds.dim; ++j) out << ',' << fixed6(row[j]);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows) {
  out << "strategy,seeds,final_acc_mean,final_acc_std,time_to_target_mean_s,"
         "time_to_target_std_s,reached_target,aggregations_mean,truncated_runs,failed_runs\n";
  for (const SweepSummaryRow& r : rows)
    out << r.strategy << ',' << r.seeds << ',' << fixed6(r.final_acc_mean) << ','
        << fixed6(r.final_acc_std) << ',' << fixed6(r.time_to_target_mean_s) << ','
        << fixed6(r.time_to_target_std_s) << ',' << r.reached_target << ','
        << fixed6(r.aggregations_mean) << ',' << r.truncated_runs << ',' << r.failed_runs
        << '\n';
}

}  // namespace leofl
