#include "omc/config.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "omc/errors.hpp"

namespace omc {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kPsd: return "psd";
    case Algorithm::kAsymTheoretical: return "asym-theoretical";
    case Algorithm::kAsymPractical: return "asym-practical";
  }
  throw ConfigError("algorithm_name: bad enum value");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "psd") return Algorithm::kPsd;
  if (name == "asym-theoretical") return Algorithm::kAsymTheoretical;
  if (name == "asym-practical") return Algorithm::kAsymPractical;
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected psd | asym-theoretical | asym-practical)");
}

void validate_config(const RunConfig& cfg) {
  if (cfg.d1 < 1 || cfg.d2 < 1) throw ConfigError("config: d1, d2 must be >= 1");
  if (cfg.k < 1 || cfg.k > std::min(cfg.d1, cfg.d2))
    throw ConfigError("config: requires 1 <= k <= min(d1, d2)");
  if (!(cfg.kappa >= 1.0)) throw ConfigError("config: kappa must be >= 1");
  if (cfg.algorithm == Algorithm::kPsd && cfg.d1 != cfg.d2)
    throw ConfigError("config: psd algorithm needs d1 == d2");
  if (cfg.eta.has_value() == cfg.c.has_value())
    throw ConfigError("config: exactly one of eta and c must be set");
  if (cfg.eta && !(*cfg.eta >= 0.0) )
    throw ConfigError("config: eta must be >= 0");
  if (cfg.c && !(*cfg.c > 0.0)) throw ConfigError("config: c must be > 0");
  if (cfg.steps < 0) throw ConfigError("config: T must be >= 0");
  if (cfg.m_init < 1) throw ConfigError("config: m_init must be >= 1");
  if (cfg.trace_interval < 1)
    throw ConfigError("config: trace_interval must be >= 1");
  if (cfg.gram_refresh_interval < 1)
    throw ConfigError("config: gram_refresh_interval must be >= 1");
  if (cfg.init_power_iters < 1)
    throw ConfigError("config: init_power_iters must be >= 1");
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::json j{{"algorithm", algorithm_name(cfg.algorithm)},
                   {"d1", cfg.d1},
                   {"d2", cfg.d2},
                   {"k", cfg.k},
                   {"kappa", cfg.kappa},
                   {"T", cfg.steps},
                   {"m_init", cfg.m_init},
                   {"trace_interval", cfg.trace_interval},
                   {"gram_refresh_interval", cfg.gram_refresh_interval},
                   {"init_power_iters", cfg.init_power_iters},
                   {"seed", cfg.seed}};
  if (cfg.eta) j["eta"] = *cfg.eta;
  if (cfg.c) j["c"] = *cfg.c;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    cfg.d1 = j.at("d1").get<int>();
    cfg.d2 = j.at("d2").get<int>();
    cfg.k = j.at("k").get<int>();
    cfg.kappa = j.at("kappa").get<double>();
    cfg.steps = j.at("T").get<long long>();
    cfg.m_init = j.at("m_init").get<long long>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trace_interval"))
      cfg.trace_interval = j.at("trace_interval").get<long long>();
    if (j.contains("gram_refresh_interval"))
      cfg.gram_refresh_interval = j.at("gram_refresh_interval").get<long long>();
    if (j.contains("init_power_iters"))
      cfg.init_power_iters = j.at("init_power_iters").get<int>();
    if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: missing or mistyped field: ") +
                      e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string config_hash(const RunConfig& cfg) {
  std::string bytes = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

double resolve_eta(const RunConfig& cfg, const ProblemStats& ps) {
  if (cfg.eta) return *cfg.eta;
  int d = std::max(cfg.d1, cfg.d2);
  if (d < 2)
    throw ConfigError("config: the c schedule needs max(d1, d2) >= 2");
  return *cfg.c /
         (ps.mu * double(d) * double(cfg.k) * std::pow(ps.kappa, 3.0) *
          std::log(double(d)));
}

long long recommended_init_samples(double c0, double mu, int d1, int d2,
                                   int k, double kappa) {
  int d = std::max(d1, d2);
  if (d < 2) return 1;
  double m = c0 * mu * double(d) * double(k) * double(k) * kappa * kappa *
             std::log(double(d));
  return (long long)std::ceil(m);
}

}  // namespace omc
