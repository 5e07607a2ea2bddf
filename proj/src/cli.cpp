#include "semioscope/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semioscope/capacity.hpp"
#include "semioscope/certify.hpp"
#include "semioscope/errors.hpp"
#include "semioscope/estimation.hpp"
#include "semioscope/io.hpp"

namespace semioscope {

namespace {

bool has_extension(const std::string& path, const char* ext) {
  return std::filesystem::path(path).extension() == ext;
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
      throw DomainError("bad lambda value '" + tok + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw DomainError("no lambda values given");
  return out;
}

EstimatorMethod parse_method(const std::string& name) {
  if (name == "plugin") return EstimatorMethod::plugin;
  if (name == "miller_madow") return EstimatorMethod::miller_madow;
  throw DomainError("method must be 'plugin' or 'miller_madow', got '" + name + "'");
}

struct SimulateArgs {
  std::string scenario;
  std::string lambdas;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  const Scenario scenario = load_scenario(a.scenario);
  std::vector<InteractionRecord> records;
  const std::vector<double> lambdas = parse_lambda_list(a.lambdas);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    // One derived seed per temperature so multi-lambda runs stay reproducible.
    auto batch = sample_interactions(scenario.source, Lambda(lambdas[k]),
                                     scenario.channel, a.n, a.seed + k);
    records.insert(records.end(), batch.begin(), batch.end());
  }
  std::ostringstream body;
  if (has_extension(a.out, ".csv")) {
    write_records_csv(body, records);
  } else {
    write_records_jsonl(body, records);
  }
  write_text_file(a.out, body.str());
}

struct ProfileArgs {
  std::string scenario;
  std::string grid = "0.05:20:64:log";
  double risk_cap = kDefaultRiskCap;
  std::string out;
};

void run_profile(const ProfileArgs& a) {
  const Scenario scenario = load_scenario(a.scenario);
  const std::vector<double> grid = parse_grid_spec(a.grid);
  const ProfileCurve curve =
      profile(scenario.source, scenario.channel, grid, a.risk_cap);
  if (has_extension(a.out, ".json")) {
    write_text_file(a.out, curve_to_json(curve).dump(2) + "\n");
  } else {
    std::ostringstream body;
    write_curve_csv(body, curve);
    write_text_file(a.out, body.str());
  }
}

struct EstimateArgs {
  std::string records;
  std::string format; // empty: take it from the extension
  std::string method = "plugin";
  std::size_t bootstrap = 0;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::string out;
  std::string curve_out; // optional empirical profile CSV
};

nlohmann::json estimate_json(const EstimateWithCI& e, bool with_ci) {
  nlohmann::json j = {{"point", e.point.value}};
  if (with_ci) {
    j["ci_low"] = e.ci_low.value;
    j["ci_high"] = e.ci_high.value;
    j["n_bootstrap"] = e.n_bootstrap;
    j["level"] = e.level;
  }
  return j;
}

void run_estimate(const EstimateArgs& a) {
  RecordFormat format = RecordFormat::jsonl;
  if (a.format == "csv" || (a.format.empty() && has_extension(a.records, ".csv"))) {
    format = RecordFormat::csv;
  } else if (!a.format.empty() && a.format != "jsonl") {
    throw DomainError("format must be 'jsonl' or 'csv', got '" + a.format + "'");
  }
  const EstimatorMethod method = parse_method(a.method);
  const std::string text = read_text_file(a.records);
  std::istringstream stream(text);
  const std::vector<CountTable> tables = ingest(stream, format);

  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const CountTable& table = tables[t];
    nlohmann::json estimates;
    const Statistic stats[] = {Statistic::entropy_m, Statistic::entropy_int,
                               Statistic::mi, Statistic::cond_entropy};
    const char* names[] = {"entropy_m", "entropy_int", "mi", "cond_entropy"};
    for (int s = 0; s < 4; ++s) {
      if (a.bootstrap > 0) {
        estimates[names[s]] = estimate_json(
            bootstrap_ci(table, stats[s], a.bootstrap, a.seed + t, a.level, method),
            true);
      } else {
        EstimateWithCI plain;
        switch (stats[s]) {
          case Statistic::entropy_m:
            plain.point = estimate_entropy(table, Axis::message, method);
            break;
          case Statistic::entropy_int:
            plain.point = estimate_entropy(table, Axis::interpretation, method);
            break;
          case Statistic::mi:
            plain.point = estimate_mutual_information(table, method);
            break;
          case Statistic::cond_entropy:
            plain.point = estimate_conditional_entropy(table, method);
            break;
        }
        estimates[names[s]] = estimate_json(plain, false);
      }
    }
    groups.push_back({{"audience_id", table.audience_id},
                      {"context_id", table.context_id},
                      {"lambda", table.lambda},
                      {"n", table.total()},
                      {"method", a.method},
                      {"estimates", std::move(estimates)}});
  }
  write_text_file(a.out, groups.dump(2) + "\n");

  if (!a.curve_out.empty()) {
    std::optional<BootstrapConfig> cfg;
    if (a.bootstrap > 0) cfg = BootstrapConfig{a.bootstrap, a.seed, a.level};
    const EmpiricalProfile ep = empirical_profile(tables, method, cfg);
    std::ostringstream body;
    write_empirical_curve_csv(body, ep);
    write_text_file(a.curve_out, body.str());
  }
}

struct CapacityArgs {
  std::string scenario;
  std::vector<double> bounds = {0.05, 20.0};
  std::size_t coarse = 33;
  double tol = 1e-4;
  double ba_tol = 1e-8;
  int ba_max_iter = 200000;
  std::string out;
};

void run_capacity(const CapacityArgs& a) {
  const Scenario scenario = load_scenario(a.scenario);
  if (a.bounds.size() != 2) throw DomainError("--bounds needs exactly two values");
  CapacityReport report{
      lambda_opt(scenario.source, scenario.channel, a.bounds[0], a.bounds[1],
                 a.coarse, a.tol),
      blahut_arimoto(scenario.channel, a.ba_tol, a.ba_max_iter),
      scenario.channel.interpretation_ids.size()};
  write_text_file(a.out, capacity_report_to_json(report).dump(2) + "\n");
}

struct CertifyArgs {
  std::string curve;
  std::string capacity;
  std::string policy;
  std::string out;
};

void run_certify(const CertifyArgs& a) {
  const CapacityReport capacity =
      capacity_report_from_json(load_json_file(a.capacity));
  ProfileCurve curve;
  if (has_extension(a.curve, ".json")) {
    curve = curve_from_json(load_json_file(a.curve));
  } else {
    std::istringstream stream(read_text_file(a.curve));
    curve = read_curve_csv(stream);
    // The CSV schema carries no channel ids; adopt the capacity report's.
    curve.audience_id = capacity.result.audience_id;
    curve.context_id = capacity.result.context_id;
  }
  const CertificationPolicy policy = policy_from_json(load_json_file(a.policy));
  const CertificationReport report =
      certify(curve, capacity.result, policy, capacity.interp_alphabet);
  write_text_file(a.out, report_to_json(report).dump(2) + "\n");
}

struct RiskArgs {
  std::string curve;
  double cap = kDefaultRiskCap;
  std::string out;
};

void run_risk(const RiskArgs& a) {
  ProfileCurve curve;
  if (has_extension(a.curve, ".json")) {
    curve = curve_from_json(load_json_file(a.curve));
  } else {
    std::istringstream stream(read_text_file(a.curve));
    curve = read_curve_csv(stream);
  }
  std::ostringstream body;
  body << "lambda,breadth_bits,decipherability_bits,risk\n";
  for (const auto& pt : curve.points) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", pt.lambda,
                  pt.breadth_bits.value, pt.decipherability_bits.value,
                  risk_score(pt.breadth_bits, pt.decipherability_bits, a.cap));
    body << buf;
  }
  write_text_file(a.out, body.str());
}

struct AdaptArgs {
  std::string scenario;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_adapt(const AdaptArgs& a) {
  const Scenario scenario = load_scenario(a.scenario);
  AdaptRun run = adapt_run_from_json(load_json_file(a.config));
  if (a.seed) run.seed = *a.seed;
  const auto trace =
      adapt_lambda(make_scenario_sampler(scenario, run.seed), run.config);
  std::ostringstream body;
  write_trace_csv(body, trace);
  write_text_file(a.out, body.str());
}

} // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("semioscope");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"semiotic capacity toolkit: profile, estimate and certify "
               "message sources speaking through interpretation channels"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "sample interaction records from a scenario");
  simulate->add_option("--scenario", sim.scenario,
                       "scenario file or builtin:<name>")->required();
  simulate->add_option("--lambda", sim.lambdas,
                       "temperature, or comma-separated list")->required();
  simulate->add_option("--n", sim.n, "records per temperature");
  simulate->add_option("--seed", sim.seed, "PRNG seed");
  simulate->add_option("--out", sim.out, "output records (.jsonl or .csv)")->required();

  ProfileArgs prof;
  auto* profile_cmd = app.add_subcommand(
      "profile", "sweep a temperature grid and emit the S/D curve");
  profile_cmd->add_option("--scenario", prof.scenario,
                          "scenario file or builtin:<name>")->required();
  profile_cmd->add_option("--grid", prof.grid, "lo:hi:points:log|lin");
  profile_cmd->add_option("--risk-cap", prof.risk_cap,
                          "risk value reported when decipherability is 0");
  profile_cmd->add_option("--out", prof.out, "output curve (.csv or .json)")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand(
      "estimate", "estimate breadth/decipherability from interaction logs");
  estimate->add_option("--records", est.records, "records file")->required();
  estimate->add_option("--format", est.format, "jsonl or csv (default: extension)");
  estimate->add_option("--method", est.method, "plugin or miller_madow");
  estimate->add_option("--bootstrap", est.bootstrap,
                       "bootstrap replicates (0 disables intervals)");
  estimate->add_option("--level", est.level, "confidence level");
  estimate->add_option("--seed", est.seed, "bootstrap seed");
  estimate->add_option("--out", est.out, "output estimates JSON")->required();
  estimate->add_option("--curve-out", est.curve_out,
                       "also write the empirical profile CSV (records must "
                       "share one audience/context)");

  CapacityArgs cap;
  auto* capacity = app.add_subcommand(
      "capacity", "find lambda_opt and the channel capacity bound");
  capacity->add_option("--scenario", cap.scenario,
                       "scenario file or builtin:<name>")->required();
  capacity->add_option("--bounds", cap.bounds, "search bounds: lo hi")
      ->expected(2);
  capacity->add_option("--coarse", cap.coarse, "coarse scan points");
  capacity->add_option("--tol", cap.tol, "bracket width tolerance on lambda");
  capacity->add_option("--ba-tol", cap.ba_tol, "Blahut-Arimoto gap tolerance (bits)");
  capacity->add_option("--ba-max-iter", cap.ba_max_iter, "Blahut-Arimoto iteration cap");
  capacity->add_option("--out", cap.out, "output capacity JSON")->required();

  CertifyArgs cert;
  auto* certify_cmd = app.add_subcommand(
      "certify", "check a profile against a certification policy");
  certify_cmd->add_option("--curve", cert.curve, "curve file (.csv or .json)")->required();
  certify_cmd->add_option("--capacity", cert.capacity, "capacity JSON")->required();
  certify_cmd->add_option("--policy", cert.policy, "policy JSON")->required();
  certify_cmd->add_option("--out", cert.out, "output report JSON")->required();

  RiskArgs risk;
  auto* risk_cmd = app.add_subcommand(
      "risk", "recompute interpretive risk columns from a curve");
  risk_cmd->add_option("--curve", risk.curve, "curve file (.csv or .json)")->required();
  risk_cmd->add_option("--cap", risk.cap, "risk cap when decipherability is 0");
  risk_cmd->add_option("--out", risk.out, "output risk CSV")->required();

  AdaptArgs adapt;
  auto* adapt_cmd = app.add_subcommand(
      "adapt", "run the adaptive temperature controller against a scenario");
  adapt_cmd->add_option("--scenario", adapt.scenario,
                        "scenario file or builtin:<name>")->required();
  adapt_cmd->add_option("--config", adapt.config, "controller config JSON")->required();
  adapt_cmd->add_option("--seed", adapt.seed, "override the config seed");
  adapt_cmd->add_option("--out", adapt.out, "output trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) run_simulate(sim);
    if (profile_cmd->parsed()) run_profile(prof);
    if (estimate->parsed()) run_estimate(est);
    if (capacity->parsed()) run_capacity(cap);
    if (certify_cmd->parsed()) run_certify(cert);
    if (risk_cmd->parsed()) run_risk(risk);
    if (adapt_cmd->parsed()) run_adapt(adapt);
  } catch (const IoError& e) {
    std::cerr << "semioscope: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "semioscope: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "semioscope: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace semioscope
