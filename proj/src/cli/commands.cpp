#include "lwshrink/cli.hpp"

#include "lwshrink/oracle.hpp"
#include "lwshrink/shrinkage.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lwshrink::cli {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

// Maps the library's exception types onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

RunConfig load_run_config(const std::string& path) {
  if (path.size() >= 5 && path.ends_with(".json")) {
    std::ifstream in = open_input(path);
    nlohmann::json manifest;
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("manifest '" + path + "': " + e.what());
    }
    if (!manifest.contains("config_text") || !manifest["config_text"].is_string()) {
      throw InputError("manifest '" + path + "' has no config_text entry");
    }
    std::istringstream text(manifest["config_text"].get<std::string>());
    return parse_config(text);
  }
  return load_config(path);
}

nlohmann::json describe(const ExperimentConfig& c) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(c.mode));
  j["distribution"] = distribution_label(c.distribution);
  j["assumption_compliant_tails"] = assumption_compliant(c.distribution);
  j["sigma_mode"] = std::string(to_string(c.sigma_mode));
  if (c.mode == ExperimentMode::grid) {
    j["grid_p"] = c.grid_p;
    j["grid_n"] = c.grid_n;
  } else {
    j["c"] = c.ratio;
    j["n_values"] = c.n_values;
  }
  j["n_mc"] = c.n_mc;
  j["base_seed"] = c.base_seed;
  j["threads"] = c.threads;
  j["record_timing"] = c.record_timing;
  std::vector<std::string> names;
  for (Estimator e : c.estimators) names.emplace_back(to_string(e));
  j["estimators"] = names;
  return j;
}

}  // namespace

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Variant variant = parse_variant(options.variant);
    std::ifstream in = open_input(options.input);
    const ObservationMatrix x(read_samples_csv(in, options.has_header));
    if (x.samples() < minimum_samples(variant)) {
      throw PreconditionError("variant " + std::string(to_string(variant)) + " needs at least " +
                              std::to_string(minimum_samples(variant)) + " samples (rows), got " +
                              std::to_string(x.samples()));
    }
    const ShrinkageResult result = estimate(x, variant);
    const ShrinkageScalars& s = result.scalars;

    out << "variant=" << to_string(variant) << '\n'
        << "p=" << x.dim() << '\n'
        << "n=" << x.samples() << '\n'
        << "m=" << format_scalar(s.m) << '\n'
        << "d2=" << format_scalar(s.d2) << '\n'
        << "bbar2=" << format_scalar(s.bbar2) << '\n'
        << "b2_raw=" << format_scalar(s.b2_raw) << '\n'
        << "b2=" << format_scalar(s.b2) << '\n'
        << "a2=" << format_scalar(s.a2) << '\n'
        << "intensity=" << format_scalar(result.shrinkage_intensity) << '\n';

    if (options.output.empty()) {
      write_matrix_csv(result.estimate.data(), out);
    } else {
      std::ofstream file = open_output(options.output);
      write_matrix_csv(result.estimate.data(), file);
    }
    return kExitOk;
  });
}

int cmd_experiment(ExperimentMode mode, const ExperimentOptions& options, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_run_config(options.config_path);
    if (config.experiment.mode != mode) {
      throw InputError("config has mode '" + std::string(to_string(config.experiment.mode)) +
                       "' but the '" + std::string(to_string(mode)) + "' command was used");
    }
    if (options.out) config.csv_path = *options.out;
    if (options.seed) config.experiment.base_seed = *options.seed;
    if (options.threads) config.experiment.threads = *options.threads;
    if (config.csv_path.empty()) throw InputError("no output path: set [output] csv or pass --out");

    const std::string started = utc_timestamp();
    const ExperimentTable table = run_experiment(config.experiment);
    const std::string finished = utc_timestamp();

    {
      std::ofstream csv = open_output(config.csv_path);
      write_loss_csv(table, csv);
    }
    nlohmann::json outputs;
    outputs["csv"] = config.csv_path;
    if (mode == ExperimentMode::grid) {
      const std::string diff_path = config.csv_path + ".diff.csv";
      std::ofstream diff = open_output(diff_path);
      write_difference_csv(table, diff);
      outputs["difference_csv"] = diff_path;
    }
    const std::string manifest_path = config.csv_path + ".manifest.json";
    outputs["manifest"] = manifest_path;

    RunConfig resolved = config;
    resolved.experiment.threads = 0;
    nlohmann::json manifest;
    manifest["version"] = std::string(kVersion);
    manifest["command"] = std::string(to_string(mode));
    manifest["config"] = describe(config.experiment);
    manifest["config_text"] = render_config(resolved);
    manifest["started_at"] = started;
    manifest["finished_at"] = finished;
    manifest["outputs"] = outputs;
    std::ofstream mf = open_output(manifest_path);
    mf << manifest.dump(2) << '\n';

    out << "wrote " << table.records().size() << " records to " << config.csv_path << '\n';
    return kExitOk;
  });
}

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.gaussian == options.student_nu.has_value()) {
      throw InputError("choose exactly one of --gaussian or --student NU");
    }
    if (options.identity == !options.sigma_path.empty()) {
      throw InputError("choose exactly one of --identity or --sigma FILE");
    }

    std::optional<SymmetricMatrix> sigma;
    if (options.identity) {
      if (!options.p || *options.p < 1) throw InputError("--identity needs -p >= 1");
      sigma = SymmetricMatrix::identity(*options.p);
    } else {
      std::ifstream in = open_input(options.sigma_path);
      sigma = SymmetricMatrix(read_matrix_csv(in));
      if (options.p && *options.p != sigma->dim()) {
        throw InputError("-p " + std::to_string(*options.p) + " does not match the " +
                         std::to_string(sigma->dim()) + "x" + std::to_string(sigma->dim()) +
                         " sigma file");
      }
      psd_sqrt(*sigma);
    }

    const OracleScalars s = options.gaussian ? gaussian_beta2(*sigma, options.n)
                                             : student_beta2(*sigma, options.n, *options.student_nu);
    out << "mu=" << format_scalar(s.mu) << '\n'
        << "alpha2=" << format_scalar(s.alpha2) << '\n'
        << "beta2=" << format_scalar(s.beta2) << '\n'
        << "delta2=" << format_scalar(s.delta2) << '\n';
    if (s.theta2) out << "theta2=" << format_scalar(*s.theta2) << '\n';
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translation-invariant Ledoit-Wolf shrinkage estimators and Monte-Carlo benchmarks",
               "lwshrink"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Shrink the covariance of a samples-as-rows CSV file");
  estimate_cmd->add_option("input", est.input, "CSV file, one sample per row")->required();
  estimate_cmd->add_option("--variant", est.variant, "u, r, m or s")->capture_default_str();
  estimate_cmd->add_option("--out", est.output, "Where to write the p x p estimate (default: stdout)");
  estimate_cmd->add_flag("--header", est.has_header, "Skip the first line of the input");

  ExperimentOptions grid_opts;
  ExperimentOptions conv_opts;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_path;
  auto add_experiment = [&](const char* name, const char* help, ExperimentOptions& opts) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("config", opts.config_path, "Config file, or a run manifest (.json) to re-run")
        ->required();
    cmd->add_option("--out", out_path, "Output CSV path (overrides [output] csv)");
    cmd->add_option("--seed", seed, "Base seed (overrides experiment.seed)");
    cmd->add_option("--threads", threads, "Worker threads (default: logical cores)");
    return cmd;
  };
  auto* grid_cmd = add_experiment("grid", "Monte-Carlo losses over a (p, n) grid", grid_opts);
  auto* conv_cmd = add_experiment("convergence", "Monte-Carlo losses at a fixed ratio p/n", conv_opts);

  OracleOptions oracle;
  Index p_value = 0;
  double nu = 0.0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print closed-form population scalars");
  oracle_cmd->add_option("-p", p_value, "Dimension (required with --identity)");
  oracle_cmd->add_option("-n", oracle.n, "Sample count")->required();
  oracle_cmd->add_flag("--gaussian", oracle.gaussian, "Gaussian samples");
  oracle_cmd->add_option("--student", nu, "t samples with this many degrees of freedom");
  oracle_cmd->add_flag("--identity", oracle.identity, "Sigma = I_p");
  oracle_cmd->add_option("--sigma", oracle.sigma_path, "CSV file holding Sigma");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (estimate_cmd->parsed()) return cmd_estimate(est, out, err);
  if (grid_cmd->parsed() || conv_cmd->parsed()) {
    const bool is_grid = grid_cmd->parsed();
    CLI::App* cmd = is_grid ? grid_cmd : conv_cmd;
    ExperimentOptions opts = is_grid ? grid_opts : conv_opts;
    if (cmd->count("--out")) opts.out = out_path;
    if (cmd->count("--seed")) opts.seed = seed;
    if (cmd->count("--threads")) opts.threads = threads;
    return cmd_experiment(is_grid ? ExperimentMode::grid : ExperimentMode::convergence, opts, out, err);
  }
  if (oracle_cmd->count("-p")) oracle.p = p_value;
  if (oracle_cmd->count("--student")) oracle.student_nu = nu;
  return cmd_oracle(oracle, out, err);
}

}  // namespace lwshrink::cli
