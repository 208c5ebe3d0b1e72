// omc: command-line harness around the matrix-completion engine.
// Subcommands: generate, run, sweep, verify.
// Exit codes: 0 success, 1 check failure, 2 divergence/degeneracy,
// 3 config/usage error.
#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "omc/errors.hpp"
#include "omc/sgd.hpp"
#include "omc/verify.hpp"

namespace {

using namespace omc;

// Shortest round-trip decimal form, so identical runs write identical bytes.
std::string fmt_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

std::string out_dir() {
  const char* env = std::getenv("OMC_OUT_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

std::string default_path(const std::string& stem, const RunConfig& cfg,
                         const std::string& ext) {
  return out_dir() + "/" + stem + "-" + config_hash(cfg).substr(0, 8) + ext;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << content;
  if (!f) throw ConfigError("write failed: " + path);
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kDiverged: return "diverged";
    case RunStatus::kDegenerate: return "degenerate";
  }
  return "unknown";
}

// Attaches the RunConfig flags to a subcommand. Values land in `cfg`;
// presence flags let a JSON --config file be overridden field by field.
struct ConfigFlags {
  std::string config_path;
  std::string algorithm = "psd";
  RunConfig cfg;
  double eta_flag = 0.0;
  double c_flag = 0.0;

  void attach(CLI::App* cmd, bool needs_run_fields) {
    cmd->add_option("--config", config_path,
                    "JSON config file; flags override its fields");
    cmd->add_option("--algorithm", algorithm,
                    "psd | asym-theoretical | asym-practical");
    cmd->add_option("--d1", cfg.d1, "rows of M");
    cmd->add_option("--d2", cfg.d2, "columns of M");
    cmd->add_option("--k", cfg.k, "rank");
    cmd->add_option("--kappa", cfg.kappa, "target condition number");
    cmd->add_option("--seed", cfg.seed, "master seed");
    if (needs_run_fields) {
      cmd->add_option("--eta", eta_flag, "literal step size");
      cmd->add_option("--c", c_flag,
                      "step constant for eta = c/(mu d k kappa^3 log d)");
      cmd->add_option("--steps,-T", cfg.steps, "online steps T");
      cmd->add_option("--m-init", cfg.m_init, "offline sample count");
      cmd->add_option("--trace-interval", cfg.trace_interval,
                      "checkpoint spacing in steps");
      cmd->add_option("--gram-refresh-interval", cfg.gram_refresh_interval,
                      "exact gram recompute spacing");
      cmd->add_option("--init-power-iters", cfg.init_power_iters,
                      "power iterations in the spectral initialization");
    }
  }

  // Resolve after parsing: file first, then any flag the user passed.
  RunConfig resolve(CLI::App* cmd, bool needs_run_fields) {
    RunConfig r;
    if (!config_path.empty()) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) throw ConfigError("cannot open config: " + config_path);
      std::ostringstream ss;
      ss << f.rdbuf();
      r = config_from_json(ss.str());
    }
    if (cmd->count("--algorithm")) r.algorithm = algorithm_from_name(algorithm);
    if (cmd->count("--d1")) r.d1 = cfg.d1;
    if (cmd->count("--d2")) r.d2 = cfg.d2;
    if (cmd->count("--k")) r.k = cfg.k;
    if (cmd->count("--kappa")) r.kappa = cfg.kappa;
    if (cmd->count("--seed")) r.seed = cfg.seed;
    if (needs_run_fields) {
      if (cmd->count("--eta")) {
        r.eta = eta_flag;
        r.c.reset();
      }
      if (cmd->count("--c")) {
        r.c = c_flag;
        r.eta.reset();
      }
      if (cmd->count("--eta") && cmd->count("--c"))
        throw ConfigError("pass --eta or --c, not both");
      if (cmd->count("--steps")) r.steps = cfg.steps;
      if (cmd->count("--m-init")) r.m_init = cfg.m_init;
      if (cmd->count("--trace-interval")) r.trace_interval = cfg.trace_interval;
      if (cmd->count("--gram-refresh-interval"))
        r.gram_refresh_interval = cfg.gram_refresh_interval;
      if (cmd->count("--init-power-iters"))
        r.init_power_iters = cfg.init_power_iters;
    } else {
      // generate: only the instance fields matter; keep placeholders valid.
      if (!r.eta && !r.c) r.eta = 0.0;
      if (r.steps <= 0) r.steps = 0;
      if (r.m_init <= 0) r.m_init = 1;
    }
    return r;
  }
};

nlohmann::json stats_json(const ProblemStats& ps) {
  return {{"mu", ps.mu},
          {"kappa", ps.kappa},
          {"frob_norm_sq", ps.frob_norm_sq}};
}

nlohmann::json init_json(const InitQuality& q) {
  return {{"frob_err", q.frob_err},
          {"max_row_leverage_u", q.max_row_leverage_u},
          {"max_row_leverage_v", q.max_row_leverage_v},
          {"bound_frob", q.bound_frob},
          {"bound_row_u", q.bound_row_u},
          {"bound_row_v", q.bound_row_v},
          {"frob_ok", q.frob_ok},
          {"row_u_ok", q.row_u_ok},
          {"row_v_ok", q.row_v_ok},
          {"inside_region", q.inside_region}};
}

std::string trace_csv(const RunConfig& cfg, const std::vector<StepTrace>& tr,
                      bool timing) {
  std::string s = "# config_hash=" + config_hash(cfg) + "\n";
  s += "step,f,max_g,max_h,sigma_min_align_u,sigma_min_align_v,elapsed_ns\n";
  for (const StepTrace& t : tr) {
    s += std::to_string(t.step) + "," + fmt_double(t.f) + "," +
         fmt_double(t.max_g) + "," + fmt_double(t.max_h) + "," +
         fmt_double(t.sigma_min_align_u) + "," +
         fmt_double(t.sigma_min_align_v) + "," +
         (timing ? std::to_string(t.elapsed_ns) : std::string("0")) + "\n";
  }
  return s;
}

int cmd_generate(CLI::App* cmd, ConfigFlags& fl, const std::string& out,
                 const std::string& stats_out) {
  RunConfig cfg = fl.resolve(cmd, false);
  if (cfg.d1 <= 0 || cfg.d2 <= 0 || cfg.k <= 0)
    throw ConfigError("generate needs --d1, --d2, --k (or a config file)");
  GroundTruth gt = gen_ground_truth(cfg.d1, cfg.d2, cfg.k, cfg.kappa, cfg.seed,
                                    cfg.algorithm == Algorithm::kPsd);
  ProblemStats ps = stats(gt);
  std::string gt_path = out.empty() ? default_path("gt", cfg, ".json") : out;
  save_ground_truth(gt, gt_path);
  nlohmann::json meta{{"config_hash", config_hash(cfg)},
                      {"ground_truth", gt_path},
                      {"d1", gt.d1},
                      {"d2", gt.d2},
                      {"k", gt.k},
                      {"symmetric_psd", gt.symmetric_psd},
                      {"stats", stats_json(ps)}};
  std::string meta_path =
      stats_out.empty() ? default_path("gt-stats", cfg, ".json") : stats_out;
  write_file(meta_path, meta.dump(2) + "\n");
  std::cout << "wrote " << gt_path << " and " << meta_path << "\n";
  return 0;
}

int cmd_run(CLI::App* cmd, ConfigFlags& fl, const std::string& gt_path,
            const std::string& trace_out, const std::string& summary_out,
            const std::string& init_csv, bool timing) {
  RunConfig cfg = fl.resolve(cmd, true);
  validate_config(cfg);
  GroundTruth gt;
  if (!gt_path.empty()) {
    gt = load_ground_truth(gt_path);
  } else {
    gt = gen_ground_truth(cfg.d1, cfg.d2, cfg.k, cfg.kappa, cfg.seed,
                          cfg.algorithm == Algorithm::kPsd);
  }
  RunResult res = run(gt, cfg);
  ProblemStats ps = stats(gt);

  std::string tp = trace_out.empty() ? default_path("trace", cfg, ".csv")
                                     : trace_out;
  write_file(tp, trace_csv(cfg, res.trace, timing));

  if (!init_csv.empty()) {
    std::string s = "# config_hash=" + config_hash(cfg) + "\ni,j,value\n";
    for (const Entry& e : res.init_set)
      s += std::to_string(e.i) + "," + std::to_string(e.j) + "," +
           fmt_double(e.value) + "\n";
    write_file(init_csv, s);
  }

  long long wall_ns = res.trace.empty() ? 0 : res.trace.back().elapsed_ns;
  long long done =
      res.status == RunStatus::kOk ? cfg.steps
                                   : std::max<long long>(res.fail_step, 0);
  nlohmann::json summary{
      {"config_hash", config_hash(cfg)},
      {"config", nlohmann::json::parse(config_to_json(cfg))},
      {"stats", stats_json(ps)},
      {"status", status_name(res.status)},
      {"fail_step", res.fail_step},
      {"message", res.message},
      {"eta_resolved", res.eta},
      {"init", init_json(res.init)},
      {"final_f", res.trace.empty() ? 0.0 : res.trace.back().f},
      {"total_steps", done},
      {"wall_ns", wall_ns},
      {"per_step_ns", done > 0 ? double(wall_ns) / double(done) : 0.0},
      {"trace", tp}};
  std::string sp = summary_out.empty() ? default_path("summary", cfg, ".json")
                                       : summary_out;
  write_file(sp, summary.dump(2) + "\n");
  std::cout << "status=" << status_name(res.status)
            << " final_f=" << fmt_double(summary["final_f"].get<double>())
            << " trace=" << tp << " summary=" << sp << "\n";
  if (res.status != RunStatus::kOk) {
    std::cerr << "run " << status_name(res.status) << " at step "
              << res.fail_step << ": " << res.message << "\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(CLI::App* cmd, ConfigFlags& fl, const std::string& axis,
              const std::string& values_csv, int trials, int jobs,
              const std::string& out) {
  RunConfig base = fl.resolve(cmd, true);
  if (axis != "seed") validate_config(base);
  if (trials < 1) throw ConfigError("sweep: --trials must be >= 1");
  std::vector<double> values;
  {
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("sweep: bad value '" + tok + "'");
      }
    }
  }
  if (values.empty()) throw ConfigError("sweep: --values is empty");

  struct Cell {
    double value = 0.0;
    int trial = 0;
    RunConfig cfg;
  };
  std::vector<Cell> cells;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (int t = 0; t < trials; ++t) {
      Cell c;
      c.value = values[vi];
      c.trial = t;
      c.cfg = base;
      double v = values[vi];
      if (axis == "seed") {
        c.cfg.seed = std::uint64_t(v);
      } else if (axis == "m_init") {
        c.cfg.m_init = (long long)(v);
      } else if (axis == "eta") {
        c.cfg.eta = v;
        c.cfg.c.reset();
      } else if (axis == "c") {
        c.cfg.c = v;
        c.cfg.eta.reset();
      } else if (axis == "steps") {
        c.cfg.steps = (long long)(v);
      } else if (axis == "kappa") {
        c.cfg.kappa = v;
      } else {
        throw ConfigError("sweep: unknown axis '" + axis + "'");
      }
      // Trial 0 inherits the base seed (a single-value, single-trial sweep
      // reproduces cmd_run exactly); extra trials get derived child streams.
      if (axis != "seed" && t > 0)
        c.cfg.seed = stream_seed(base.seed,
                                 kStreamSweepBase + (std::uint64_t)cells.size());
      validate_config(c.cfg);
      cells.push_back(c);
    }
  }

  if (jobs < 1) jobs = 1;
  std::mutex mu;
  nlohmann::json rows = nlohmann::json::array();
  rows.get_ref<nlohmann::json::array_t&>().resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& c = cells[idx];
      // Seed-axis rows hash the config with the seed normalized out, so the
      // rows of a pure seed sweep carry one identical hash; the literal seed
      // sits in its own field.
      RunConfig hashed = c.cfg;
      if (axis == "seed") hashed.seed = 0;
      nlohmann::json row{{"value", c.value},
                         {"trial", c.trial},
                         {"seed", c.cfg.seed},
                         {"config_hash", config_hash(hashed)}};
      std::string line;
      try {
        RunResult res = run_from_config(c.cfg);
        row["status"] = status_name(res.status);
        row["final_f"] = res.trace.empty() ? 0.0 : res.trace.back().f;
        row["init_frob_err"] = res.init.frob_err;
        row["fail_step"] = res.fail_step;
        line = "status=" + status_name(res.status);
      } catch (const std::exception& e) {
        row["status"] = "error";
        row["message"] = e.what();
        line = std::string("error: ") + e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      rows[idx] = row;
      std::cout << "[cell " << idx << " " << axis << "=" << fmt_double(c.value)
                << " trial=" << c.trial << "] " << line << "\n";
    }
  };
  std::vector<std::future<void>> pool;
  for (int j = 0; j < jobs - 1; ++j)
    pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();

  // Median final_f and init error per axis value, over ok cells.
  nlohmann::json medians = nlohmann::json::array();
  for (double v : values) {
    std::vector<double> ff, ie;
    int failed = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].value != v) continue;
      if (rows[i]["status"] == "ok") {
        ff.push_back(rows[i]["final_f"].get<double>());
        ie.push_back(rows[i]["init_frob_err"].get<double>());
      } else {
        ++failed;
      }
    }
    auto median = [](std::vector<double>& x) {
      if (x.empty()) return 0.0;
      std::sort(x.begin(), x.end());
      return x[x.size() / 2];
    };
    medians.push_back(nlohmann::json{{"value", v},
                                     {"ok", int(ff.size())},
                                     {"failed", failed},
                                     {"median_final_f", median(ff)},
                                     {"median_init_frob_err", median(ie)}});
  }

  RunConfig agg_base = base;
  if (axis == "seed") agg_base.seed = 0;
  nlohmann::json agg{{"config_hash", config_hash(agg_base)},
                     {"axis", axis},
                     {"trials", trials},
                     {"base_config", nlohmann::json::parse(config_to_json(base))},
                     {"cells", rows},
                     {"medians", medians}};
  std::string path = out.empty() ? default_path("sweep", base, ".json") : out;
  write_file(path, agg.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_verify(const std::string& only, bool only_given, double beta_scale,
               std::uint64_t seed, const std::string& out) {
  std::vector<CheckReport> all = run_all_checks(seed, beta_scale);
  std::vector<CheckReport> selected;
  if (!only_given) {
    selected = all;
  } else {
    // Comma-separated name substrings; empty selection runs nothing.
    std::vector<std::string> toks;
    std::stringstream ss(only);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) toks.push_back(tok);
    }
    for (const CheckReport& r : all)
      for (const std::string& t : toks)
        if (r.name.find(t) != std::string::npos) {
          selected.push_back(r);
          break;
        }
  }
  std::string j = reports_to_json(selected);
  if (!out.empty()) write_file(out, j);
  std::cout << j;
  for (const CheckReport& r : selected)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online low-rank matrix completion engine"};
  app.require_subcommand(1);

  ConfigFlags gen_fl, run_fl, sweep_fl;
  std::string gen_out, gen_stats_out;
  CLI::App* gen = app.add_subcommand("generate", "write a ground-truth file");
  gen_fl.attach(gen, false);
  gen->add_option("--out", gen_out, "ground-truth JSON path");
  gen->add_option("--stats-out", gen_stats_out, "instance stats JSON path");

  std::string run_gt, run_trace, run_summary, run_init_csv;
  bool run_timing = false;
  CLI::App* runc = app.add_subcommand("run", "single SGD run with trace");
  run_fl.attach(runc, true);
  runc->add_option("--gt", run_gt, "load ground truth instead of generating");
  runc->add_option("--trace-out", run_trace, "trace CSV path");
  runc->add_option("--summary-out", run_summary, "summary JSON path");
  runc->add_option("--dump-init-csv", run_init_csv,
                   "also write the offline sample set as CSV");
  runc->add_flag("--timing-in-trace", run_timing,
                 "write real elapsed_ns in the CSV (breaks bit-identical "
                 "reruns; timings go to the summary JSON by default)");

  std::string sweep_axis = "seed", sweep_values, sweep_out;
  int sweep_trials = 1, sweep_jobs = int(std::thread::hardware_concurrency());
  if (sweep_jobs < 1) sweep_jobs = 1;
  if (sweep_jobs > 8) sweep_jobs = 8;
  CLI::App* sw = app.add_subcommand("sweep", "axis sweep with parallel cells");
  sweep_fl.attach(sw, true);
  sw->add_option("--axis", sweep_axis,
                 "seed | m_init | eta | c | steps | kappa");
  sw->add_option("--values", sweep_values, "comma-separated axis values")
      ->required();
  sw->add_option("--trials", sweep_trials, "trials per value");
  sw->add_option("--jobs", sweep_jobs, "parallel workers");
  sw->add_option("--out", sweep_out, "aggregate JSON path");

  std::string ver_only, ver_out;
  double ver_beta = 1.0;
  std::uint64_t ver_seed = 2026;
  CLI::App* ver = app.add_subcommand("verify", "run the property-check suite");
  CLI::Option* only_opt = ver->add_option(
      "--only", ver_only, "comma-separated name substrings; '' runs nothing");
  ver->add_option("--beta-scale", ver_beta,
                  "smoothness-constant multiplier (0.5 = negative control)");
  ver->add_option("--seed", ver_seed, "suite seed");
  ver->add_option("--report-out", ver_out, "report JSON path");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_generate(gen, gen_fl, gen_out, gen_stats_out);
    if (runc->parsed())
      return cmd_run(runc, run_fl, run_gt, run_trace, run_summary,
                     run_init_csv, run_timing);
    if (sw->parsed())
      return cmd_sweep(sw, sweep_fl, sweep_axis, sweep_values, sweep_trials,
                       sweep_jobs, sweep_out);
    if (ver->parsed())
      return cmd_verify(ver_only, only_opt->count() > 0, ver_beta, ver_seed,
                        ver_out);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const DegeneracyError& e) {
    std::cerr << "degeneracy: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
