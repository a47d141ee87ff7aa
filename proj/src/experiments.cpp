// SPDX-License-Identifier: Apache-2.0
#include "netisac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace netisac::exp {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Typed access to one JSON object with field paths in every error.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(path_ + "." + it.key(), "unknown field");
  }
  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return path_ + "." + key; }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
    return x;
  }
  std::int64_t integer(const char* key, std::int64_t def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::string string(const char* key, const std::string& def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

Vec2 parse_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path, "expected [x, y] in meters");
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

std::vector<Vec2> parse_points(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected a list of [x, y]");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json points_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const Vec2& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

ScenarioConfig parse_scenario(const json& j, const std::string& path, std::string& preset) {
  Reader r(j, path);
  r.allow({"preset", "num_bs", "num_cu", "num_antennas", "num_samples", "service_radius",
           "bs_positions", "cu_positions", "target_position", "pathloss_exp_comm",
           "pathloss_exp_sense", "noise_comm_dbm", "noise_radar_dbm", "max_power_dbm",
           "bandwidth_hz", "rcs", "rng_seed", "min_separation"});
  preset = r.string("preset", preset);
  ScenarioConfig c;
  if (preset == "default") c = default_scenario();
  else if (preset == "table2") c = table2_scenario();
  else throw ConfigError(r.at("preset"), "expected \"default\" or \"table2\"");

  c.num_bs = static_cast<int>(r.integer("num_bs", c.num_bs));
  c.num_cu = static_cast<int>(r.integer("num_cu", c.num_cu));
  c.num_antennas = static_cast<int>(r.integer("num_antennas", c.num_antennas));
  c.num_samples = static_cast<int>(r.integer("num_samples", c.num_samples));
  c.service_radius = r.number("service_radius", c.service_radius);
  if (r.has("bs_positions")) c.bs_positions = parse_points(r.raw("bs_positions"), r.at("bs_positions"));
  if (r.has("cu_positions")) {
    const json& v = r.raw("cu_positions");
    if (v.is_string()) {
      if (v.get<std::string>() != "random") throw ConfigError(r.at("cu_positions"), "expected \"random\" or a list");
      c.cu_positions.reset();
    } else {
      c.cu_positions = parse_points(v, r.at("cu_positions"));
    }
  } else if (c.cu_positions && static_cast<int>(c.cu_positions->size()) != c.num_cu) {
    c.cu_positions.reset();  // preset positions do not fit an overridden count
  }
  if (r.has("target_position")) {
    const json& v = r.raw("target_position");
    if (v.is_string()) {
      if (v.get<std::string>() != "random") throw ConfigError(r.at("target_position"), "expected \"random\" or [x, y]");
      c.target_position.reset();
    } else {
      c.target_position = parse_point(v, r.at("target_position"));
    }
  }
  c.pathloss_exp_comm = r.number("pathloss_exp_comm", c.pathloss_exp_comm);
  c.pathloss_exp_sense = r.number("pathloss_exp_sense", c.pathloss_exp_sense);
  c.noise_comm_dbm = r.number("noise_comm_dbm", c.noise_comm_dbm);
  c.noise_radar_dbm = r.number("noise_radar_dbm", c.noise_radar_dbm);
  c.max_power_dbm = r.number("max_power_dbm", c.max_power_dbm);
  c.bandwidth_hz = r.number("bandwidth_hz", c.bandwidth_hz);
  c.rcs = r.number("rcs", c.rcs);
  const std::int64_t seed = r.integer("rng_seed", static_cast<std::int64_t>(c.rng_seed));
  if (seed < 0) throw ConfigError(r.at("rng_seed"), "must be non-negative");
  c.rng_seed = static_cast<std::uint64_t>(seed);
  c.min_separation = r.number("min_separation", c.min_separation);
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

AoConfig parse_ao(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"mu", "eps_tol", "max_iter", "rank_tol", "binary_tol", "init", "solver_tol",
           "solver_max_iter"});
  AoConfig a;
  a.mu = r.number("mu", a.mu);
  a.eps_tol = r.number("eps_tol", a.eps_tol);
  a.max_iter = static_cast<int>(r.integer("max_iter", a.max_iter));
  a.rank_tol = r.number("rank_tol", a.rank_tol);
  a.binary_tol = r.number("binary_tol", a.binary_tol);
  const std::string init = r.string("init", "best");
  if (init == "best") a.init = InitPolicy::BestOfAll;
  else if (init == "first") a.init = InitPolicy::FirstFeasible;
  else throw ConfigError(r.at("init"), "expected \"best\" or \"first\"");
  a.solver.tol = r.number("solver_tol", a.solver.tol);
  a.solver.max_iter = static_cast<int>(r.integer("solver_max_iter", a.solver.max_iter));
  try {
    a.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  return a;
}

std::string fmt(double x, int prec = 6) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

double mean_dbm(const std::vector<double>& watts) {
  if (watts.empty()) return kNaN;
  double s = 0.0;
  for (double w : watts) s += w;
  return watts_to_dbm(s / static_cast<double>(watts.size()));
}

// Runs jobs [0, n) on `threads` workers; results land by index, so the
// output order never depends on scheduling.
template <class Job>
void parallel_for(int n, int threads, Job job) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < std::min(threads, n); ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

SolutionReport error_report(const std::string& scheme, const std::exception& e) {
  SolutionReport r;
  r.scheme = scheme;
  r.status = ReportStatus::SolverError;
  r.message = e.what();
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (version != kConfigVersion) throw ConfigError("$.version", "unsupported version");
  if (grid.empty()) throw ConfigError("$.grid", "must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i].crlb_eps > 0.0) || !std::isfinite(grid[i].gamma_db))
      throw ConfigError("$.grid[" + std::to_string(i) + "]", "need finite gamma_db and crlb_eps > 0");
  if (schemes.empty()) throw ConfigError("$.schemes", "must not be empty");
  for (std::size_t i = 0; i < schemes.size(); ++i)
    if (std::find(known_schemes().begin(), known_schemes().end(), schemes[i]) == known_schemes().end())
      throw ConfigError("$.schemes[" + std::to_string(i) + "]", "unknown scheme '" + schemes[i] + "'");
  if (num_seeds < 1) throw ConfigError("$.num_seeds", "must be >= 1");
  if (threads < 1) throw ConfigError("$.threads", "must be >= 1");
  try {
    scenario.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("$.scenario", e.what());
  }
  try {
    ao.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("$.ao", e.what());
  }
}

ExperimentConfig parse_config(const json& j) {
  Reader r(j, "$");
  r.allow({"version", "scenario", "grid", "schemes", "num_seeds", "first_seed", "ao",
           "oracle_cap", "threads", "out"});
  ExperimentConfig c;
  if (!r.has("version")) throw ConfigError("$.version", "missing");
  c.version = static_cast<int>(r.integer("version", 0));
  if (c.version != kConfigVersion)
    throw ConfigError("$.version", "unsupported version " + std::to_string(c.version) +
                                       " (expected " + std::to_string(kConfigVersion) + ")");
  if (r.has("scenario")) c.scenario = parse_scenario(r.raw("scenario"), "$.scenario", c.preset);
  if (r.has("grid")) {
    const json& g = r.raw("grid");
    if (!g.is_array()) throw ConfigError("$.grid", "expected a list");
    c.grid.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string p = "$.grid[" + std::to_string(i) + "]";
      Reader gi(g[i], p);
      gi.allow({"gamma_db", "crlb_eps"});
      c.grid.push_back({gi.number("gamma_db", 8.0), gi.number("crlb_eps", 1.0)});
    }
  }
  if (r.has("schemes")) {
    const json& s = r.raw("schemes");
    if (!s.is_array()) throw ConfigError("$.schemes", "expected a list");
    c.schemes.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_string()) throw ConfigError("$.schemes[" + std::to_string(i) + "]", "expected a string");
      c.schemes.push_back(s[i].get<std::string>());
    }
  }
  c.num_seeds = static_cast<int>(r.integer("num_seeds", c.num_seeds));
  const std::int64_t fs = r.integer("first_seed", 0);
  if (fs < 0) throw ConfigError("$.first_seed", "must be non-negative");
  c.first_seed = static_cast<std::uint64_t>(fs);
  if (r.has("ao")) c.ao = parse_ao(r.raw("ao"), "$.ao");
  const std::int64_t cap = r.integer("oracle_cap", static_cast<std::int64_t>(c.oracle_cap));
  if (cap < 1) throw ConfigError("$.oracle_cap", "must be >= 1");
  c.oracle_cap = static_cast<std::uint64_t>(cap);
  c.threads = static_cast<int>(r.integer("threads", c.threads));
  c.out = r.string("out", c.out);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  const ScenarioConfig& s = c.scenario;
  json sc = {{"preset", c.preset},
             {"num_bs", s.num_bs},
             {"num_cu", s.num_cu},
             {"num_antennas", s.num_antennas},
             {"num_samples", s.num_samples},
             {"service_radius", s.service_radius},
             {"bs_positions", points_json(s.bs_positions)},
             {"pathloss_exp_comm", s.pathloss_exp_comm},
             {"pathloss_exp_sense", s.pathloss_exp_sense},
             {"noise_comm_dbm", s.noise_comm_dbm},
             {"noise_radar_dbm", s.noise_radar_dbm},
             {"max_power_dbm", s.max_power_dbm},
             {"bandwidth_hz", s.bandwidth_hz},
             {"rcs", s.rcs},
             {"rng_seed", s.rng_seed},
             {"min_separation", s.min_separation}};
  sc["cu_positions"] = s.cu_positions ? points_json(*s.cu_positions) : json("random");
  sc["target_position"] =
      s.target_position ? json::array({s.target_position->x(), s.target_position->y()}) : json("random");
  json grid = json::array();
  for (const QosPoint& q : c.grid) grid.push_back({{"gamma_db", q.gamma_db}, {"crlb_eps", q.crlb_eps}});
  return {{"version", c.version},
          {"scenario", sc},
          {"grid", grid},
          {"schemes", c.schemes},
          {"num_seeds", c.num_seeds},
          {"first_seed", c.first_seed},
          {"ao",
           {{"mu", c.ao.mu},
            {"eps_tol", c.ao.eps_tol},
            {"max_iter", c.ao.max_iter},
            {"rank_tol", c.ao.rank_tol},
            {"binary_tol", c.ao.binary_tol},
            {"init", c.ao.init == InitPolicy::BestOfAll ? "best" : "first"},
            {"solver_tol", c.ao.solver.tol},
            {"solver_max_iter", c.ao.solver.max_iter}}},
          {"oracle_cap", c.oracle_cap},
          {"threads", c.threads},
          {"out", c.out}};
}

Trial make_trial(const ScenarioConfig& scenario, std::uint64_t seed) {
  ScenarioConfig sc = scenario;
  sc.rng_seed = seed;
  Trial t{build_scene(sc), {}};
  t.channels = sample_channels(t.scene, derive_seed(seed, SeedStream::Channel));
  return t;
}

QosSpec make_qos(const Scene& scene, const QosPoint& q) {
  return QosSpec::uniform(scene.num_cu(), q.gamma_db, q.crlb_eps, scene.max_power());
}

SolutionReport run_scheme(const std::string& scheme, const Instance& inst, const AoConfig& ao,
                          std::uint64_t seed, std::uint64_t oracle_cap) {
  if (scheme == "proposed") return run_ao(inst, ao);
  if (scheme == "scheme1") return scheme1_closest(inst, ao);
  if (scheme == "scheme2") return scheme2_random(inst, ao, seed);
  if (scheme == "scheme3") return scheme3_bistatic(inst, ao);
  if (scheme == "oracle") return brute_force(inst, ao, oracle_cap).best;
  throw InvalidArgument("unknown scheme '" + scheme + "'");
}

std::string csv_row(const ResultRow& r) {
  const SolutionReport& p = r.report;
  const bool ok = p.feasible();
  std::ostringstream os;
  os << r.seed << ',' << r.scheme << ',' << fmt(r.qos.gamma_db) << ',' << fmt(r.qos.crlb_eps) << ','
     << (ok ? 1 : 0) << ',' << (ok ? fmt(p.total_power_dbm(), 10) : "nan") << ',';
  if (p.rx_bs >= 0) os << p.rx_bs + 1;
  os << ',' << p.iterations << ',' << (ok ? fmt(p.crlb, 10) : "nan") << ','
     << (ok ? fmt(p.min_sinr_db(), 10) : "nan") << ',' << fmt(p.runtime_s, 4);
  return os.str();
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows,
                                  const std::vector<std::string>& schemes,
                                  const std::vector<QosPoint>& grid) {
  std::vector<SummaryRow> out;
  for (const QosPoint& q : grid)
    for (const std::string& s : schemes) {
      SummaryRow sr;
      sr.scheme = s;
      sr.qos = q;
      std::vector<double> watts;
      for (const ResultRow& r : rows) {
        if (r.scheme != s || r.qos.gamma_db != q.gamma_db || r.qos.crlb_eps != q.crlb_eps) continue;
        ++sr.trials;
        switch (r.report.status) {
          case ReportStatus::Feasible:
            ++sr.feasible;
            watts.push_back(r.report.total_power);
            break;
          case ReportStatus::Infeasible: ++sr.infeasible; break;
          case ReportStatus::SolverError: ++sr.solver_errors; break;
        }
      }
      sr.infeasibility_rate = sr.trials ? static_cast<double>(sr.infeasible) / sr.trials : kNaN;
      sr.mean_power_dbm = mean_dbm(watts);
      out.push_back(sr);
    }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  struct Job {
    std::size_t g;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g)
    for (int i = 0; i < cfg.num_seeds; ++i) jobs.push_back({g, cfg.first_seed + static_cast<std::uint64_t>(i)});
  const std::size_t ns = cfg.schemes.size();
  SweepResult res;
  res.rows.resize(jobs.size() * ns);
  std::mutex mu;
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int j) {
    const Job& job = jobs[j];
    const QosPoint q = cfg.grid[job.g];
    const Trial t = make_trial(cfg.scenario, job.seed);
    const Instance inst(t.scene, t.channels, make_qos(t.scene, q));
    for (std::size_t s = 0; s < ns; ++s) {
      ResultRow row{job.seed, cfg.schemes[s], q, {}};
      try {
        row.report = run_scheme(row.scheme, inst, cfg.ao, job.seed, cfg.oracle_cap);
      } catch (const InvalidArgument& e) {
        row.report = error_report(row.scheme, e);
      }
      res.rows[j * ns + s] = row;
      if (progress) {
        std::lock_guard<std::mutex> lock(mu);
        progress(row);
      }
    }
  });
  res.summary = summarize(res.rows, cfg.schemes, cfg.grid);
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kCsvHeader << '\n';
  for (const ResultRow& row : r.rows) os << csv_row(row) << '\n';
  os << "# summary: mean power over feasible trials only; infeasibility_rate = infeasible/trials\n";
  os << "# scheme,gamma_db,crlb_eps,trials,feasible,infeasible,solver_errors,infeasibility_rate,"
        "mean_power_dbm\n";
  for (const SummaryRow& s : r.summary)
    os << "# " << s.scheme << ',' << fmt(s.qos.gamma_db) << ',' << fmt(s.qos.crlb_eps) << ','
       << s.trials << ',' << s.feasible << ',' << s.infeasible << ',' << s.solver_errors << ','
       << fmt(s.infeasibility_rate) << ',' << fmt(s.mean_power_dbm, 8) << '\n';
}

Table2Result run_table2(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  const QosPoint q = cfg.grid.front();
  Table2Result out;
  const int n = cfg.num_seeds;
  out.proposed.resize(n);
  out.scheme1.resize(n);
  std::mutex mu;
  parallel_for(n, cfg.threads, [&](int i) {
    const std::uint64_t seed = cfg.first_seed + static_cast<std::uint64_t>(i);
    const Trial t = make_trial(cfg.scenario, seed);
    const Instance inst(t.scene, t.channels, make_qos(t.scene, q));
    out.proposed[i] = {seed, "proposed", q, run_ao(inst, cfg.ao)};
    out.scheme1[i] = {seed, "scheme1", q, scheme1_closest(inst, cfg.ao)};
    if (progress) {
      std::lock_guard<std::mutex> lock(mu);
      progress(out.proposed[i]);
      progress(out.scheme1[i]);
    }
  });
  out.rx_histogram.assign(cfg.scenario.num_bs, 0);
  std::vector<double> wp, ws;
  for (const ResultRow& r : out.proposed)
    if (r.report.feasible()) {
      ++out.rx_histogram[r.report.rx_bs];
      wp.push_back(r.report.total_power);
    }
  for (const ResultRow& r : out.scheme1)
    if (r.report.feasible()) {
      ws.push_back(r.report.total_power);
      out.scheme1_rx = r.report.rx_bs;
    }
  out.proposed_feasible = static_cast<int>(wp.size());
  out.scheme1_feasible = static_cast<int>(ws.size());
  if (!wp.empty())
    out.modal_rx = static_cast<int>(std::max_element(out.rx_histogram.begin(), out.rx_histogram.end()) -
                                    out.rx_histogram.begin());
  out.proposed_mean_dbm = mean_dbm(wp);
  out.scheme1_mean_dbm = mean_dbm(ws);
  return out;
}

json to_json(const Table2Result& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.proposed.size(); ++i) {
    const SolutionReport& p = r.proposed[i].report;
    const SolutionReport& s = r.scheme1[i].report;
    rows.push_back({{"seed", r.proposed[i].seed},
                    {"proposed_rx_bs", p.rx_bs >= 0 ? json(p.rx_bs + 1) : json(nullptr)},
                    {"proposed_status", to_string(p.status)},
                    {"proposed_power_dbm", p.feasible() ? json(p.total_power_dbm()) : json(nullptr)},
                    {"scheme1_rx_bs", s.rx_bs >= 0 ? json(s.rx_bs + 1) : json(nullptr)},
                    {"scheme1_status", to_string(s.status)},
                    {"scheme1_power_dbm", s.feasible() ? json(s.total_power_dbm()) : json(nullptr)}});
  }
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"proposed_modal_rx_bs", r.modal_rx >= 0 ? json(r.modal_rx + 1) : json(nullptr)},
          {"proposed_rx_histogram", r.rx_histogram},
          {"scheme1_rx_bs", r.scheme1_rx >= 0 ? json(r.scheme1_rx + 1) : json(nullptr)},
          {"proposed_mean_power_dbm", num(r.proposed_mean_dbm)},
          {"scheme1_mean_power_dbm", num(r.scheme1_mean_dbm)},
          {"gap_db", num(r.scheme1_mean_dbm - r.proposed_mean_dbm)},
          {"proposed_feasible", r.proposed_feasible},
          {"scheme1_feasible", r.scheme1_feasible},
          {"seeds", rows}};
}

std::vector<OracleProbe> run_oracle_probe(const ExperimentConfig& cfg,
                                          const std::function<void(const OracleProbe&)>& progress) {
  cfg.validate();
  std::vector<OracleProbe> out(cfg.grid.size() * static_cast<std::size_t>(cfg.num_seeds));
  std::mutex mu;
  parallel_for(static_cast<int>(out.size()), cfg.threads, [&](int j) {
    OracleProbe& p = out[j];
    p.qos = cfg.grid[j / cfg.num_seeds];
    p.seed = cfg.first_seed + static_cast<std::uint64_t>(j % cfg.num_seeds);
    const Trial t = make_trial(cfg.scenario, p.seed);
    const Instance inst(t.scene, t.channels, make_qos(t.scene, p.qos));
    p.oracle = brute_force(inst, cfg.ao, cfg.oracle_cap);
    p.ao = run_ao(inst, cfg.ao);
    p.gap_db = p.oracle.best.feasible() && p.ao.feasible()
                   ? p.ao.total_power_dbm() - p.oracle.best.total_power_dbm()
                   : kNaN;
    if (progress) {
      std::lock_guard<std::mutex> lock(mu);
      progress(p);
    }
  });
  return out;
}

void write_oracle_probe_csv(std::ostream& os, const std::vector<OracleProbe>& probes) {
  os << "config,status,power_dbm,crlb,min_sinr_db\n";
  for (const OracleProbe& p : probes)
    for (const OracleRow& row : p.oracle.table)
      os << "seed=" << p.seed << ";gamma_db=" << fmt(p.qos.gamma_db) << ";" << row.config << ','
         << to_string(row.status) << ',' << fmt(row.power_dbm, 10) << ',' << fmt(row.crlb, 10) << ','
         << fmt(row.min_sinr_db, 10) << '\n';
}

json to_json(const SolutionReport& r) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  const bool ok = r.feasible();
  json j = {{"scheme", r.scheme},
            {"status", to_string(r.status)},
            {"feasible", ok},
            {"message", r.message},
            {"rx_bs", r.rx_bs >= 0 ? json(r.rx_bs + 1) : json(nullptr)},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"inaccurate", r.inaccurate},
            {"runtime_s", r.runtime_s},
            {"fbar_history", r.fbar_history}};
  json serving = json::array();
  for (int s : r.serving) serving.push_back(s + 1);
  j["serving_bs"] = serving;
  if (ok) {
    j["total_power_w"] = r.total_power;
    j["power_dbm"] = r.total_power_dbm();
    j["bs_power_w"] = std::vector<double>(r.bs_power.data(), r.bs_power.data() + r.bs_power.size());
    j["crlb_m2"] = num(r.crlb);
    json sinr_db = json::array();
    for (int k = 0; k < r.sinr.size(); ++k) sinr_db.push_back(linear_to_db(r.sinr(k)));
    j["sinr_db"] = sinr_db;
    j["min_sinr_db"] = num(r.min_sinr_db());
    j["raw_rank_ratio"] = r.raw_rank_ratio;
    j["rank_ratio"] = r.rank_ratio;
    j["sinr_boost"] = r.sinr_boost;
    json bf = json::array();
    for (std::size_t s = 0; s < r.w.size(); ++s)
      for (std::size_t k = 0; k < r.w[s].size(); ++k) {
        const CVec& w = r.w[s][k];
        if (w.size() == 0 || w.squaredNorm() == 0.0) continue;
        std::vector<double> re(w.size()), im(w.size());
        for (int n = 0; n < w.size(); ++n) {
          re[n] = w(n).real();
          im[n] = w(n).imag();
        }
        bf.push_back({{"bs", s + 1}, {"cu", k + 1}, {"re", re}, {"im", im}});
      }
    j["beamformers"] = bf;
    json rpow = json::array();
    for (const CMat& R : r.R) rpow.push_back(R.size() ? R.trace().real() : 0.0);
    j["sensing_power_w"] = rpow;
  }
  json trail = json::array();
  for (const SolveRecord& t : r.trail)
    trail.push_back({{"stage", t.stage},
                     {"status", conic::to_string(t.status)},
                     {"iterations", t.iterations},
                     {"runtime_s", t.runtime_s}});
  j["trail"] = trail;
  return j;
}

}  // namespace netisac::exp
