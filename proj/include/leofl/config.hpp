#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "leofl/flcore.hpp"
#include "leofl/learn.hpp"
#include "leofl/orbital.hpp"

namespace leofl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full experiment description. Defaults reproduce the reference scenario:
// a 40-satellite two-shell polar constellation reporting to a North Pole
// ground station for one simulated day.
struct RunConfig {
  struct Constellation {
    int planes = 10;
    int sats_per_plane = 4;
    double inclination_deg = 80.0;
    std::vector<double> altitudes_km = {500, 500, 500, 500, 500,
                                        2000, 2000, 2000, 2000, 2000};
    double phasing_offset_deg = 0.0;
  } constellation;

  struct Gs {
    double lat_deg = 90.0;
    double lon_deg = 0.0;
    double alt_m = 0.0;
    double min_elev_deg = 10.0;
  } gs;

  struct Sim {
    double duration_s = 86400.0;
    double coarse_step_s = 10.0;
    double refine_tol_s = 0.1;
  } sim;

  struct Fl {
    std::string strategy = "fedgsm";
    int buffer_size = 5;
    double eta_g = 0.1;
    std::string first_visit_mode = "bootstrap";
    double fedasync_alpha0 = 0.6;
    double fedasync_poly_a = 0.5;
  } fl;

  struct Trainer {
    std::string model = "softmax_linear";
    int epochs = 5;
    int batch_size = 10;
    double eta_l0 = 0.1;
    double lr_decay = 0.998;
    int hidden_width = 32;
  } trainer;

  struct Data {
    std::string kind = "blobs";
    int n_samples = 10000;
    int classes = 10;
    int dim = 32;
    double spread = 0.3;
    std::string partition = "iid";
    double dirichlet_beta = 0.3;
    double test_fraction = 0.2;
  } data;

  std::uint64_t seed = 1;

  int n_satellites() const { return constellation.planes * constellation.sats_per_plane; }
};

// Plain-text config: one `dotted.key = value` per line, '#' comments,
// lists comma-separated. Unknown keys are hard errors.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Applies one `dotted.key = value` override (same keys as the file format).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Emits every key in a fixed order; parse(serialize(cfg)) reproduces cfg
// exactly, including all floating-point values.
std::string serialize_config(const RunConfig& cfg);

// Cross-field validation; throws ConfigError naming the offending key.
void validate_config(const RunConfig& cfg);

// Typed views of the validated string fields.
StrategyKind strategy_kind(const RunConfig& cfg);
FirstVisitMode first_visit_mode(const RunConfig& cfg);
ModelKind model_kind(const RunConfig& cfg);
bool partition_is_iid(const RunConfig& cfg);

ConstellationSpec make_constellation_spec(const RunConfig& cfg);
GroundStation make_ground_station(const RunConfig& cfg);
ModelSpec make_model_spec(const RunConfig& cfg);
TrainerConfig make_trainer_config(const RunConfig& cfg);

}  // namespace leofl
