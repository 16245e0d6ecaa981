#include "leofl/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace leofl {

namespace {

constexpr double kDegToRad = kPi / 180.0;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError("config key '" + key + "': empty value");
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size())
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return d;
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError("config key '" + key + "': empty value");
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError("config key '" + key + "': empty value");
  char* end = nullptr;
  const unsigned long long i = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v[0] == '-')
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return i;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_double_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"constellation.planes",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.constellation.planes = static_cast<int>(parse_int(k, v));
       }},
      {"constellation.sats_per_plane",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.constellation.sats_per_plane = static_cast<int>(parse_int(k, v));
       }},
      {"constellation.inclination_deg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.constellation.inclination_deg = parse_double(k, v);
       }},
      {"constellation.altitudes_km",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.constellation.altitudes_km = parse_double_list(k, v);
       }},
      {"constellation.phasing_offset_deg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.constellation.phasing_offset_deg = parse_double(k, v);
       }},
      {"gs.lat_deg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gs.lat_deg = parse_double(k, v);
       }},
      {"gs.lon_deg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gs.lon_deg = parse_double(k, v);
       }},
      {"gs.alt_m",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gs.alt_m = parse_double(k, v);
       }},
      {"gs.min_elev_deg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gs.min_elev_deg = parse_double(k, v);
       }},
      {"sim.duration_s",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sim.duration_s = parse_double(k, v);
       }},
      {"sim.coarse_step_s",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sim.coarse_step_s = parse_double(k, v);
       }},
      {"sim.refine_tol_s",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sim.refine_tol_s = parse_double(k, v);
       }},
      {"fl.strategy",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.fl.strategy = trim(v);
       }},
      {"fl.buffer_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fl.buffer_size = static_cast<int>(parse_int(k, v));
       }},
      {"fl.eta_g",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fl.eta_g = parse_double(k, v);
       }},
      {"fl.first_visit_mode",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.fl.first_visit_mode = trim(v);
       }},
      {"fl.fedasync_alpha0",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fl.fedasync_alpha0 = parse_double(k, v);
       }},
      {"fl.fedasync_poly_a",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fl.fedasync_poly_a = parse_double(k, v);
       }},
      {"trainer.model",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.trainer.model = trim(v);
       }},
      {"trainer.epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trainer.epochs = static_cast<int>(parse_int(k, v));
       }},
      {"trainer.batch_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trainer.batch_size = static_cast<int>(parse_int(k, v));
       }},
      {"trainer.eta_l0",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trainer.eta_l0 = parse_double(k, v);
       }},
      {"trainer.lr_decay",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trainer.lr_decay = parse_double(k, v);
       }},
      {"trainer.hidden_width",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trainer.hidden_width = static_cast<int>(parse_int(k, v));
       }},
      {"data.kind",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.data.kind = trim(v);
       }},
      {"data.n_samples",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.n_samples = static_cast<int>(parse_int(k, v));
       }},
      {"data.classes",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.classes = static_cast<int>(parse_int(k, v));
       }},
      {"data.dim",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.dim = static_cast<int>(parse_int(k, v));
       }},
      {"data.spread",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.spread = parse_double(k, v);
       }},
      {"data.partition",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.data.partition = trim(v);
       }},
      {"data.dirichlet_beta",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.dirichlet_beta = parse_double(k, v);
       }},
      {"data.test_fraction",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data.test_fraction = parse_double(k, v);
       }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_u64(k, v);
       }},
  };
  return table;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(trim(key));
  if (it == table.end()) throw ConfigError("unknown config key '" + trim(key) + "'");
  it->second(cfg, trim(key), value);
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + stripped + "'");
    apply_override(cfg, stripped.substr(0, eq), stripped.substr(eq + 1));
  }
  return cfg;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "constellation.planes = " << c.constellation.planes << "\n";
  out << "constellation.sats_per_plane = " << c.constellation.sats_per_plane << "\n";
  out << "constellation.inclination_deg = " << fmt_double(c.constellation.inclination_deg) << "\n";
  out << "constellation.altitudes_km = " << fmt_double_list(c.constellation.altitudes_km) << "\n";
  out << "constellation.phasing_offset_deg = " << fmt_double(c.constellation.phasing_offset_deg)
      << "\n";
  out << "gs.lat_deg = " << fmt_double(c.gs.lat_deg) << "\n";
  out << "gs.lon_deg = " << fmt_double(c.gs.lon_deg) << "\n";
  out << "gs.alt_m = " << fmt_double(c.gs.alt_m) << "\n";
  out << "gs.min_elev_deg = " << fmt_double(c.gs.min_elev_deg) << "\n";
  out << "sim.duration_s = " << fmt_double(c.sim.duration_s) << "\n";
  out << "sim.coarse_step_s = " << fmt_double(c.sim.coarse_step_s) << "\n";
  out << "sim.refine_tol_s = " << fmt_double(c.sim.refine_tol_s) << "\n";
  out << "fl.strategy = " << c.fl.strategy << "\n";
  out << "fl.buffer_size = " << c.fl.buffer_size << "\n";
  out << "fl.eta_g = " << fmt_double(c.fl.eta_g) << "\n";
  out << "fl.first_visit_mode = " << c.fl.first_visit_mode << "\n";
  out << "fl.fedasync_alpha0 = " << fmt_double(c.fl.fedasync_alpha0) << "\n";
  out << "fl.fedasync_poly_a = " << fmt_double(c.fl.fedasync_poly_a) << "\n";
  out << "trainer.model = " << c.trainer.model << "\n";
  out << "trainer.epochs = " << c.trainer.epochs << "\n";
  out << "trainer.batch_size = " << c.trainer.batch_size << "\n";
  out << "trainer.eta_l0 = " << fmt_double(c.trainer.eta_l0) << "\n";
  out << "trainer.lr_decay = " << fmt_double(c.trainer.lr_decay) << "\n";
  out << "trainer.hidden_width = " << c.trainer.hidden_width << "\n";
  out << "data.kind = " << c.data.kind << "\n";
  out << "data.n_samples = " << c.data.n_samples << "\n";
  out << "data.classes = " << c.data.classes << "\n";
  out << "data.dim = " << c.data.dim << "\n";
  out << "data.spread = " << fmt_double(c.data.spread) << "\n";
  out << "data.partition = " << c.data.partition << "\n";
  out << "data.dirichlet_beta = " << fmt_double(c.data.dirichlet_beta) << "\n";
  out << "data.test_fraction = " << fmt_double(c.data.test_fraction) << "\n";
  out << "seed = " << c.seed << "\n";
  return out.str();
}

StrategyKind strategy_kind(const RunConfig& cfg) {
  try {
    return parse_strategy(cfg.fl.strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'fl.strategy': ") + e.what());
  }
}

FirstVisitMode first_visit_mode(const RunConfig& cfg) {
  try {
    return parse_first_visit_mode(cfg.fl.first_visit_mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'fl.first_visit_mode': ") + e.what());
  }
}

ModelKind model_kind(const RunConfig& cfg) {
  try {
    return parse_model_kind(cfg.trainer.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'trainer.model': ") + e.what());
  }
}

bool partition_is_iid(const RunConfig& cfg) {
  if (cfg.data.partition == "iid") return true;
  if (cfg.data.partition == "dirichlet") return false;
  throw ConfigError("config key 'data.partition': expected iid or dirichlet, got '" +
                    cfg.data.partition + "'");
}

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
  };
  if (c.constellation.planes < 1) fail("constellation.planes", "must be at least 1");
  if (c.constellation.sats_per_plane < 1)
    fail("constellation.sats_per_plane", "must be at least 1");
  if (c.constellation.altitudes_km.size() !=
      static_cast<std::size_t>(c.constellation.planes))
    fail("constellation.altitudes_km",
         "need exactly one altitude per plane (" +
             std::to_string(c.constellation.planes) + "), got " +
             std::to_string(c.constellation.altitudes_km.size()));
  for (double a : c.constellation.altitudes_km)
    if (!(a > 0.0)) fail("constellation.altitudes_km", "altitudes must be positive");
  if (c.gs.lat_deg < -90.0 || c.gs.lat_deg > 90.0)
    fail("gs.lat_deg", "latitude must lie in [-90, 90]");
  if (c.gs.min_elev_deg < 0.0 || c.gs.min_elev_deg >= 90.0)
    fail("gs.min_elev_deg", "elevation mask must lie in [0, 90)");
  if (!(c.sim.duration_s > 0.0)) fail("sim.duration_s", "must be positive");
  if (!(c.sim.coarse_step_s > 0.0)) fail("sim.coarse_step_s", "must be positive");
  if (!(c.sim.refine_tol_s > 0.0)) fail("sim.refine_tol_s", "must be positive");
  if (c.sim.refine_tol_s >= c.sim.coarse_step_s)
    fail("sim.refine_tol_s", "must be below sim.coarse_step_s");
  strategy_kind(c);
  first_visit_mode(c);
  if (c.fl.buffer_size < 1) fail("fl.buffer_size", "must be at least 1");
  if (c.fl.buffer_size > c.n_satellites())
    fail("fl.buffer_size", "cannot exceed the satellite count (" +
                               std::to_string(c.n_satellites()) + ")");
  if (c.fl.eta_g < 0.0) fail("fl.eta_g", "must be non-negative");
  if (!(c.fl.fedasync_alpha0 > 0.0) || c.fl.fedasync_alpha0 > 1.0)
    fail("fl.fedasync_alpha0", "must lie in (0, 1]");
  if (c.fl.fedasync_poly_a < 0.0) fail("fl.fedasync_poly_a", "must be non-negative");
  model_kind(c);
  if (c.trainer.epochs < 0) fail("trainer.epochs", "must be non-negative");
  if (c.trainer.batch_size < 1) fail("trainer.batch_size", "must be at least 1");
  if (c.trainer.eta_l0 < 0.0) fail("trainer.eta_l0", "must be non-negative");
  if (!(c.trainer.lr_decay > 0.0) || c.trainer.lr_decay > 1.0)
    fail("trainer.lr_decay", "must lie in (0, 1]");
  if (c.trainer.hidden_width < 1) fail("trainer.hidden_width", "must be at least 1");
  if (c.data.kind != "blobs") fail("data.kind", "expected blobs, got '" + c.data.kind + "'");
  if (c.data.classes < 2) fail("data.classes", "need at least 2 classes");
  if (c.data.dim < 2) fail("data.dim", "need at least 2 dimensions");
  if (c.data.n_samples < c.data.classes)
    fail("data.n_samples", "need at least one sample per class");
  if (c.data.spread < 0.0) fail("data.spread", "must be non-negative");
  partition_is_iid(c);
  if (!(c.data.dirichlet_beta > 0.0)) fail("data.dirichlet_beta", "must be positive");
  if (c.data.test_fraction < 0.0 || c.data.test_fraction >= 1.0)
    fail("data.test_fraction", "must lie in [0, 1)");
  const int n_test = static_cast<int>(std::llround(c.data.n_samples * c.data.test_fraction));
  if (c.data.n_samples - n_test < c.n_satellites())
    fail("data.n_samples", "training split smaller than the satellite count");
}

ConstellationSpec make_constellation_spec(const RunConfig& c) {
  ConstellationSpec spec;
  spec.planes = c.constellation.planes;
  spec.sats_per_plane = c.constellation.sats_per_plane;
  spec.inclination_rad = c.constellation.inclination_deg * kDegToRad;
  spec.altitudes_m.reserve(c.constellation.altitudes_km.size());
  for (double km : c.constellation.altitudes_km) spec.altitudes_m.push_back(km * 1000.0);
  spec.phasing_offset_rad = c.constellation.phasing_offset_deg * kDegToRad;
  return spec;
}

GroundStation make_ground_station(const RunConfig& c) {
  GroundStation gs;
  gs.latitude_rad = c.gs.lat_deg * kDegToRad;
  gs.longitude_rad = c.gs.lon_deg * kDegToRad;
  gs.altitude_m = c.gs.alt_m;
  gs.min_elevation_rad = c.gs.min_elev_deg * kDegToRad;
  return gs;
}

ModelSpec make_model_spec(const RunConfig& c) {
  return {model_kind(c), c.data.dim, c.data.classes, c.trainer.hidden_width};
}

TrainerConfig make_trainer_config(const RunConfig& c) {
  return {c.trainer.epochs, c.trainer.batch_size, c.trainer.eta_l0, c.trainer.lr_decay};
}

}  // namespace leofl
