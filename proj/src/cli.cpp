#include "pucci_forge/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "pucci_forge/jet_cache.hpp"

namespace pucci {

namespace {

const std::set<std::string> kCommands{"verify-measurable", "scan-surface",  "ratio-campaign",
                                      "seeded-campaign",   "reconstruct-f", "fd-check"};

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw InvalidInput(std::string("config field '") + key + "' is malformed: " + j.at(key).dump());
  }
}

double real_field(const Json& j, const char* key) {
  try {
    return json_real(j.at(key));
  } catch (const std::exception&) {
    throw InvalidInput(std::string("config field '") + key + "' must be a real number");
  }
}

std::uint64_t seed_field(const Json& j, const char* key) {
  const auto& v = j.at(key);
  try {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_string()) return std::stoull(v.get<std::string>(), nullptr, 0);
  } catch (const std::exception&) {
  }
  throw InvalidInput(std::string("config field '") + key + "' must be a non-negative 64-bit integer");
}

CandidateSpec candidate_of(const RunConfig& cfg) {
  if (!cfg.candidate) throw InvalidInput("command '" + cfg.command + "' requires --candidate");
  return CandidateSpec::make(parse_candidate_id(*cfg.candidate), cfg.alpha);
}

EllipticityWindow explicit_window(const RunConfig& cfg) {
  if (!cfg.lambda || !cfg.Lambda) throw InvalidInput("both --lambda and --Lambda are required");
  return {*cfg.lambda, *cfg.Lambda};
}

Json verify_measurable_cmd(const RunConfig& cfg, int& code) {
  EllipticityWindow w;
  Json out;
  if (cfg.auto_window) {
    const auto scan = scan_surface(cfg.alpha, cfg.grid_n);
    out["scan"] = to_json(scan);
    if (!scan.admissible_window) {
      out["window"] = nullptr;
      code = kExitViolation;
      return out;
    }
    w = *scan.admissible_window;
  } else {
    if (!cfg.lambda || !cfg.Lambda)
      throw InvalidInput("verify-measurable needs --lambda and --Lambda, or --auto-window");
    w = explicit_window(cfg);
  }
  const auto verdict = verify_measurable(cfg.alpha, w, cfg.grid_n);
  out["window"] = to_json(w);
  out["verdict"] = to_json(verdict);
  code = verdict.pass ? kExitPass : kExitViolation;
  return out;
}

Json scan_surface_cmd(const RunConfig& cfg, int& code) {
  const auto scan = scan_surface(cfg.alpha, cfg.grid_n);
  code = scan.admissible_window ? kExitPass : kExitViolation;
  return to_json(scan);
}

Json campaign_cmd(const RunConfig& cfg, const CandidateSpec& c, bool seeded, int& code) {
  CampaignConfig cc = cfg.campaign;
  cc.seeded = cc.seeded || seeded;

  std::ofstream trace_file;
  std::mutex trace_mutex;
  TraceSink sink;
  if (!cfg.trace.empty()) {
    trace_file.open(cfg.trace, std::ios::trunc);
    if (!trace_file) throw std::runtime_error("cannot open trace file '" + cfg.trace + "'");
    trace_file << "start,iter,ratio,objective,coords\n";
    trace_file.precision(17);
    sink = [&](const TraceRow& row) {
      std::lock_guard lock(trace_mutex);
      trace_file << row.start << ',' << row.iter << ',' << row.ratio << ',' << row.objective << ',';
      for (std::size_t i = 0; i < row.coords.size(); ++i) trace_file << (i ? " " : "") << row.coords[i];
      trace_file << '\n';
    };
  }
  const auto rep = campaign(c, cc, sink);
  code = rep.diverged_starts > 0 ? kExitViolation : kExitPass;
  return to_json(rep);
}

Json reconstruct_cmd(const RunConfig& cfg, const CandidateSpec& c, int& code) {
  const EllipticityWindow w = (cfg.lambda || cfg.Lambda)
                                  ? explicit_window(cfg)
                                  : EllipticityWindow::from_ratio_bound(kDefaultRatioBound);
  if (cfg.samples < 2) throw InvalidInput("samples must be >= 2");
  if (cfg.queries < 1) throw InvalidInput("queries must be >= 1");
  if (cfg.trials < 1) throw InvalidInput("trials must be >= 1");
  const auto sample = cached_sample(cfg.sample_cache, c, cfg.samples, kSampleExclusion);

  const auto residuals = equation_residuals(sample, cfg.queries, w);
  const auto audit = ellipticity_audit(sample, w, cfg.trials, cfg.campaign.rng_seed);
  const double sandwich = sandwich_violation(sample, w, 10 * cfg.queries, cfg.campaign.rng_seed);
  Json queries = Json::array();
  queries.push_back(to_json(reconstruct_F(sample, SymMatrix<double>::zero(c.dim), w)));
  queries.push_back(to_json(reconstruct_F(sample, SymMatrix<double>::identity(c.dim), w)));

  const bool pass = residuals.max_residual <= kResidualTolerance && audit.worst_violation <= kAuditTolerance;
  code = pass ? kExitPass : kExitViolation;
  return Json{{"window", to_json(w)},
              {"sample_size", sample.size()},
              {"sample_exclusion", kSampleExclusion},
              {"time_boundary_included", c.parabolic()},
              {"equation_residual",
               Json{{"evaluated", residuals.evaluated},
                    {"max", real_json(residuals.max_residual)},
                    {"worst_point", to_json(sample.points[residuals.worst_index])},
                    {"tolerance", kResidualTolerance}}},
              {"ellipticity_audit", to_json(audit)},
              {"sandwich_worst_violation", real_json(sandwich)},
              {"queries", queries}};
}

Json fd_check_cmd(const RunConfig& cfg, const CandidateSpec& c, int& code) {
  const auto rep = fd_check(c, cfg.points, cfg.h, cfg.campaign.rng_seed);
  code = rep.max_relative_error <= 1e-6 ? kExitPass : kExitViolation;
  Json j = to_json(rep);
  j["tolerance"] = 1e-6;
  return j;
}

}  // namespace

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["candidate"] = candidate ? Json(*candidate) : Json(nullptr);
  j["alpha"] = alpha;
  j["lambda"] = lambda ? Json(*lambda) : Json(nullptr);
  j["Lambda"] = Lambda ? Json(*Lambda) : Json(nullptr);
  j["auto-window"] = auto_window;
  j["grid-n"] = grid_n;
  j["starts"] = campaign.starts;
  j["iters"] = campaign.iters_per_start;
  j["step0"] = campaign.step0;
  j["noise0"] = campaign.noise0;
  j["divergence-threshold"] = campaign.divergence_threshold;
  j["seeded"] = campaign.seeded;
  j["seed"] = campaign.rng_seed;
  j["out"] = out;
  j["trace"] = trace;
  j["sample-cache"] = sample_cache;
  j["points"] = points;
  j["h"] = h;
  j["samples"] = samples;
  j["queries"] = queries;
  j["trials"] = trials;
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known{
      "command", "candidate", "alpha",  "lambda", "Lambda", "auto-window", "grid-n", "starts",
      "iters",   "step0",     "noise0", "divergence-threshold", "seeded", "seed", "out", "trace",
      "sample-cache", "points", "h", "samples", "queries", "trials"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw InvalidInput("unknown config field '" + key + "'");

  RunConfig cfg;
  auto has = [&](const char* k) { return j.contains(k) && !j.at(k).is_null(); };
  if (has("command")) cfg.command = field<std::string>(j, "command");
  if (has("candidate")) cfg.candidate = field<std::string>(j, "candidate");
  if (has("alpha")) cfg.alpha = real_field(j, "alpha");
  if (has("lambda")) cfg.lambda = real_field(j, "lambda");
  if (has("Lambda")) cfg.Lambda = real_field(j, "Lambda");
  if (has("auto-window")) cfg.auto_window = field<bool>(j, "auto-window");
  if (has("grid-n")) cfg.grid_n = field<int>(j, "grid-n");
  if (has("starts")) cfg.campaign.starts = field<int>(j, "starts");
  if (has("iters")) cfg.campaign.iters_per_start = field<int>(j, "iters");
  if (has("step0")) cfg.campaign.step0 = real_field(j, "step0");
  if (has("noise0")) cfg.campaign.noise0 = real_field(j, "noise0");
  if (has("divergence-threshold")) cfg.campaign.divergence_threshold = real_field(j, "divergence-threshold");
  if (has("seeded")) cfg.campaign.seeded = field<bool>(j, "seeded");
  if (has("seed")) cfg.campaign.rng_seed = seed_field(j, "seed");
  if (has("out")) cfg.out = field<std::string>(j, "out");
  if (has("trace")) cfg.trace = field<std::string>(j, "trace");
  if (has("sample-cache")) cfg.sample_cache = field<std::string>(j, "sample-cache");
  if (has("points")) cfg.points = field<int>(j, "points");
  if (has("h")) cfg.h = real_field(j, "h");
  if (has("samples")) cfg.samples = field<int>(j, "samples");
  if (has("queries")) cfg.queries = field<int>(j, "queries");
  if (has("trials")) cfg.trials = field<int>(j, "trials");

  if (cfg.command.empty()) throw InvalidInput("config field 'command' is required");
  if (!kCommands.count(cfg.command)) throw InvalidInput("config field 'command': unknown command '" + cfg.command + "'");
  if (cfg.grid_n < 1) throw InvalidInput("config field 'grid-n' must be >= 1");
  if (cfg.points < 1) throw InvalidInput("config field 'points' must be >= 1");
  if (!(cfg.h > 0)) throw InvalidInput("config field 'h' must be positive");
  return cfg;
}

ParseResult parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{
      "pucci_forge: numerical checks of whether explicit functions solve uniformly parabolic equations.\n"
      "Exit status: 0 passed / bounded, 1 violation or divergence found, 2 usage error.",
      "pucci_forge"};
  app.set_help_flag("--help", "print this help and exit");
  std::string command, config_path;
  app.add_option("command", command, "verify-measurable | scan-surface | ratio-campaign | seeded-campaign | "
                                     "reconstruct-f | fd-check")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON config file with flag-named keys; flags override it");

  Json given = Json::object();
  std::vector<std::function<void()>> collect;
  auto opt = [&](const std::string& name, auto& var, const std::string& help) {
    auto* o = app.add_option("--" + name, var, help);
    collect.push_back([&, o, name] {
      if (o->count() > 0) given[name] = var;
    });
  };
  auto flag = [&](const std::string& name, bool& var, const std::string& help) {
    auto* o = app.add_flag("--" + name, var, help);
    collect.push_back([&, o, name] {
      if (o->count() > 0) given[name] = var;
    });
  };

  std::string candidate, out, trace, sample_cache;
  double alpha = 1, lambda = 0, Lambda = 0, step0 = 0, noise0 = 0, threshold = 0, h = 0;
  int grid_n = 0, starts = 0, iters = 0, points = 0, samples = 0, queries = 0, trials = 0;
  bool auto_window = false, seeded = false;
  std::uint64_t seed = kDefaultSeed;
  opt("candidate", candidate, "measurable2d | cand1 | cand2 | cand3 | nvt | smart9d");
  opt("alpha", alpha, "exponent of the 2-D measurable example, in (0, 4) (default 1)");
  opt("lambda", lambda, "lower ellipticity constant");
  opt("Lambda", Lambda, "upper ellipticity constant");
  flag("auto-window", auto_window, "take (lambda, Lambda) from scan-surface");
  opt("grid-n", grid_n, "surface grid intervals (default 10000)");
  opt("starts", starts, "campaign starts (default 200)");
  opt("iters", iters, "ascent iterations per start (default 20000)");
  opt("step0", step0, "initial step (default 1e-2)");
  opt("noise0", noise0, "initial noise scale (default 1e-2)");
  opt("divergence-threshold", threshold, "ratio beyond which a start diverges (default 1e4)");
  flag("seeded", seeded, "start from pairs on the known failure geometry");
  opt("seed", seed, "base RNG seed (default 0x5EED5EED)");
  opt("out", out, "report path (default stdout)");
  opt("trace", trace, "CSV path for per-iteration campaign traces");
  opt("sample-cache", sample_cache, "binary jet-sample cache for reconstruct-f");
  opt("points", points, "fd-check points (default 1000)");
  opt("h", h, "fd-check stencil (default 1e-5)");
  opt("samples", samples, "reconstruct-f sample size (default 100000)");
  opt("queries", queries, "reconstruct-f residual points (default 20)");
  opt("trials", trials, "reconstruct-f ellipticity audit trials (default 20)");

  std::vector<const char*> argv{"pucci_forge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  ParseResult res;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    res.message = app.help();
    return res;
  } catch (const CLI::ParseError& e) {
    res.exit_code = kExitUsage;
    res.message = e.what();
    return res;
  }
  for (auto& f : collect) f();
  if (!command.empty()) given["command"] = command;

  try {
    Json merged = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidInput("cannot read config file '" + config_path + "'");
      Json file;
      try {
        file = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw InvalidInput("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (!file.is_object()) throw InvalidInput("config file must hold a JSON object");
      merged.update(file);
    }
    merged.update(given);
    res.config = config_from_json(merged);
  } catch (const InvalidInput& e) {
    res.exit_code = kExitUsage;
    res.message = e.what();
  }
  return res;
}

RunResult run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  Json& rep = res.report;
  rep["tool_version"] = kToolVersion;
  rep["command"] = cfg.command;
  rep["config"] = cfg.to_json();
  int code = kExitPass;
  try {
    cfg.campaign.validate();
    if (cfg.command == "verify-measurable" || cfg.command == "scan-surface") {
      const auto c = CandidateSpec::make(CandidateId::Measurable2D, cfg.alpha);
      rep["candidate"] = to_json(c);
      rep["results"] = cfg.command == "scan-surface" ? scan_surface_cmd(cfg, code) : verify_measurable_cmd(cfg, code);
    } else {
      const auto c = candidate_of(cfg);
      rep["candidate"] = to_json(c);
      if (cfg.command == "ratio-campaign")
        rep["results"] = campaign_cmd(cfg, c, false, code);
      else if (cfg.command == "seeded-campaign")
        rep["results"] = campaign_cmd(cfg, c, true, code);
      else if (cfg.command == "reconstruct-f")
        rep["results"] = reconstruct_cmd(cfg, c, code);
      else
        rep["results"] = fd_check_cmd(cfg, c, code);
    }
  } catch (const std::exception& e) {
    // invalid inputs, inapplicable commands and unreadable files alike
    code = kExitUsage;
    rep["error"] = e.what();
  }
  res.exit_code = code;
  rep["exit_code"] = code;
  rep["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

int main_entry(const std::vector<std::string>& args) {
  const auto parsed = parse_command_line(args);
  if (!parsed.config) {
    (parsed.exit_code == kExitPass ? std::cout : std::cerr) << parsed.message << '\n';
    return parsed.exit_code;
  }
  const auto& cfg = *parsed.config;
  const auto res = run(cfg);
  if (res.report.contains("error")) std::cerr << "error: " << res.report["error"].get<std::string>() << '\n';
  const std::string text = res.report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out, std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write report to '" << cfg.out << "'\n";
      return kExitUsage;
    }
    out << text;
  }
  return res.exit_code;
}

}  // namespace pucci
