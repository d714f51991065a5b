#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qpt/error.hpp"
#include "qpt/io.hpp"
#include "qpt/keyrate.hpp"
#include "qpt/metrics.hpp"
#include "qpt/tomo.hpp"

namespace fs = std::filesystem;
using qpt::io::json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(qpt::Errc c) {
  switch (c) {
    case qpt::Errc::ParseError:
    case qpt::Errc::IncompleteData:
    case qpt::Errc::MissingEntries:
      return kData;
    case qpt::Errc::NotPositive:
    case qpt::Errc::NotAState:
    case qpt::Errc::PovmInvalid:
      return kNumerical;
    default:
      return kUsage;
  }
}

struct Run {
  json config;
  fs::path base;  // relative paths in the config resolve against this
  fs::path out;
  std::uint64_t seed = 0;

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  }
};

template <class T>
T required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

template <class T>
T optional_value(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

json section(const json& config, const std::string& key) {
  if (!config.contains(key)) return json::object();
  if (!config[key].is_object()) throw ConfigError("'" + key + "' must be an object");
  return config[key];
}

void write_json(const fs::path& p, const json& j) { qpt::io::write_text_file(p, j.dump(2) + "\n"); }

template <class F>
void write_stream(const fs::path& p, F&& body) {
  std::ostringstream os;
  body(os);
  qpt::io::write_text_file(p, os.str());
}

qpt::Channel channel_from_file(const fs::path& p) {
  json j;
  try {
    j = qpt::io::read_json_file(p);
  } catch (const json::exception& e) {
    throw qpt::Error(qpt::Errc::ParseError, p.string() + ": " + e.what());
  }
  try {
    return qpt::io::channel_from_json(j);
  } catch (const json::exception& e) {
    throw qpt::Error(qpt::Errc::ParseError, p.string() + ": " + e.what());
  }
}

// A channel is either {"file": path} or {"builder": name, ...parameters}.
qpt::Channel build_channel(const Run& run, const json& spec, std::optional<int> dim, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  if (spec.contains("file")) {
    qpt::Channel ch = channel_from_file(run.resolve(required<std::string>(spec, "file", where)));
    if (dim && ch.dim() != *dim)
      throw qpt::Error(qpt::Errc::DimensionMismatch, where + " has dimension " + std::to_string(ch.dim()));
    return ch;
  }
  if (!dim) throw ConfigError("missing 'dim'");
  const int d = *dim;
  const auto name = required<std::string>(spec, "builder", where);
  if (name == "identity") return qpt::identity_channel(d);
  if (name == "depolarizing") return qpt::depolarizing_with_fidelity(d, required<double>(spec, "fidelity", where));
  if (name == "optimal_cloning") return qpt::optimal_cloning_channel(d);
  if (name == "intercept_resend") {
    const qpt::MubFamily mubs = qpt::generate_mubs(d);
    return qpt::intercept_resend_channel(mubs, optional_value(spec, "bases", qpt::all_bases(d), where));
  }
  if (name == "diagonal_chi") {
    std::map<int, double> w;
    const json weights = spec.value("weights", json::object());
    if (!weights.is_object()) throw ConfigError("'weights' must map Weyl indices to numbers");
    for (const auto& [k, v] : weights.items()) {
      try {
        w[std::stoi(k)] = v.get<double>();
      } catch (const std::exception&) {
        throw ConfigError("bad weight entry '" + k + "'");
      }
    }
    return qpt::diagonal_chi_channel(d, w);
  }
  throw ConfigError("unknown channel builder '" + name + "'");
}

std::optional<int> config_dim(const json& config) {
  if (!config.contains("dim")) return std::nullopt;
  return required<int>(config, "dim", "config");
}

int need_dim(const json& config) {
  const auto d = config_dim(config);
  if (!d) throw ConfigError("missing 'dim'");
  return *d;
}

qpt::Channel configured_channel(const Run& run) {
  if (!run.config.contains("channel")) throw ConfigError("missing 'channel'");
  return build_channel(run, run.config["channel"], config_dim(run.config), "'channel'");
}

void save_config(const Run& run) {
  json resolved = run.config;
  resolved["seed"] = run.seed;
  write_json(run.out / "config.json", resolved);
}

// --------------------------------------------------------------------------

int cmd_simulate(const Run& run) {
  const int d = need_dim(run.config);
  const qpt::Channel channel = configured_channel(run);
  const json s = section(run.config, "sampling");
  const auto kind = qpt::sampling_kind_from_string(optional_value<std::string>(s, "model", "poisson", "'sampling'"));
  qpt::SamplingModel model;
  switch (kind) {
    case qpt::SamplingModel::Kind::Poisson:
      model = qpt::SamplingModel::poisson(optional_value(s, "mean_counts", 1e4, "'sampling'"));
      break;
    case qpt::SamplingModel::Kind::Multinomial:
      model = qpt::SamplingModel::multinomial(required<std::int64_t>(s, "total", "'sampling'"));
      break;
    case qpt::SamplingModel::Kind::Exact:
      model = qpt::SamplingModel::exact();
      break;
  }

  const qpt::MubFamily mubs = qpt::generate_mubs(d);
  const qpt::ProbabilityTable table = qpt::forward_probabilities(channel, mubs);
  qpt::TomographyData data = qpt::sample_counts(table, model, run.seed);
  data.integration_seconds = optional_value(s, "integration_seconds", 60.0, "'sampling'");

  fs::create_directories(run.out);
  write_stream(run.out / "probabilities.csv", [&](std::ostream& os) { qpt::io::write_probabilities_csv(os, table); });
  write_stream(run.out / "counts.csv", [&](std::ostream& os) { qpt::io::write_counts_csv(os, data); });
  write_json(run.out / "counts.json", qpt::io::counts_sidecar(data));
  write_json(run.out / "channel.json", qpt::io::channel_to_json(channel, "choi"));
  save_config(run);
  std::cout << "simulated " << channel.label() << " at d=" << d << ", " << table.entries.size()
            << " settings, model " << qpt::to_string(model.kind) << ", seed " << run.seed << " -> " << run.out.string()
            << "\n";
  return kOk;
}

int cmd_reconstruct(const Run& run) {
  const json r = section(run.config, "reconstruction");
  // By default read what `simulate` wrote into the output directory.
  const fs::path counts_path = r.contains("counts")
                                   ? run.resolve(required<std::string>(r, "counts", "'reconstruction'"))
                                   : run.out / "counts.csv";
  fs::path sidecar_path = counts_path;
  sidecar_path.replace_extension(".json");
  if (r.contains("sidecar")) sidecar_path = run.resolve(required<std::string>(r, "sidecar", "'reconstruction'"));

  qpt::TomographyData data;
  try {
    data = qpt::io::counts_skeleton_from_sidecar(qpt::io::read_json_file(sidecar_path));
  } catch (const json::exception& e) {
    throw qpt::Error(qpt::Errc::ParseError, sidecar_path.string() + ": " + e.what());
  }
  if (const auto d = config_dim(run.config); d && *d != data.dim)
    throw qpt::Error(qpt::Errc::DimensionMismatch, "config dim differs from the count file");
  std::ifstream in(counts_path);
  if (!in) throw qpt::Error(qpt::Errc::ParseError, "cannot open " + counts_path.string());
  try {
    qpt::io::read_counts_csv(in, data);
  } catch (const qpt::Error& e) {
    throw qpt::Error(e.code(), counts_path.string() + ": " + e.detail());
  }

  qpt::MleOptions opts;
  const std::string where = "'reconstruction'";
  opts.max_iter = optional_value(r, "max_iter", opts.max_iter, where);
  opts.stop_tol = optional_value(r, "stop_tol", opts.stop_tol, where);
  opts.dilution = optional_value(r, "dilution", opts.dilution, where);
  opts.accelerate = optional_value(r, "accelerate", opts.accelerate, where);
  opts.project_tp = optional_value(r, "project_tp", opts.project_tp, where);
  opts.allow_incomplete = optional_value(r, "allow_incomplete", opts.allow_incomplete, where);
  if (opts.max_iter < 1) throw ConfigError("max_iter must be positive");
  if (!(opts.stop_tol > 0.0)) throw ConfigError("stop_tol must be positive");
  if (opts.dilution < 0.0) throw ConfigError("dilution must be nonnegative");

  const qpt::MubFamily mubs = qpt::generate_mubs(data.dim);
  const qpt::MleResult result = qpt::mle_reconstruct(data, mubs, opts);
  const qpt::Channel estimate(result.estimate, "mle");

  json diag = qpt::io::to_json(result);
  diag["dim"] = data.dim;
  diag["counts_file"] = counts_path.filename().string();
  if (r.contains("target")) {
    const qpt::Channel target = build_channel(run, r["target"], data.dim, "'reconstruction.target'");
    diag["target"] = target.label();
    diag["trace_distance_to_target"] = qpt::linalg::trace_distance(result.estimate.matrix, target.choi().matrix);
    diag["process_fidelity_to_target"] = qpt::process_fidelity(estimate.chi(), target.chi());
  }

  fs::create_directories(run.out);
  write_json(run.out / "choi.json", qpt::io::channel_to_json(estimate, "choi"));
  write_json(run.out / "chi.json", qpt::io::chi_to_json(estimate.chi()));
  write_json(run.out / "diagnostics.json", diag);
  save_config(run);
  std::cout << "reconstructed d=" << data.dim << " in " << result.iterations << " iterations ("
            << qpt::to_string(result.stop_reason) << "), log L = " << result.log_likelihood
            << ", TP deviation = " << result.tp_deviation << "\n";
  if (diag.contains("trace_distance_to_target"))
    std::cout << "trace distance to " << diag["target"].get<std::string>() << ": "
              << diag["trace_distance_to_target"].get<double>() << "\n";
  return kOk;
}

int cmd_analyze(const Run& run) {
  const qpt::Channel channel = configured_channel(run);
  const int d = channel.dim();
  const qpt::Channel target = run.config.contains("target")
                                  ? build_channel(run, run.config["target"], d, "'target'")
                                  : qpt::identity_channel(d);
  const qpt::MubFamily mubs = qpt::generate_mubs(d);
  const qpt::ChannelMetrics m = qpt::channel_metrics(channel, target, mubs);

  fs::create_directories(run.out);
  write_json(run.out / "metrics.json", qpt::io::to_json(m));
  save_config(run);
  std::printf("%-10s %3s %10s %10s %10s %10s %10s\n", "channel", "d", "F_P", "F_avg", "P_avg", "Q_bb84", "Q_full");
  std::printf("%-10s %3d %10.6f %10.6f %10.6f %10.6f %10.6f\n", m.label.substr(0, 10).c_str(), d, m.process_fidelity,
              m.average_fidelity, m.average_purity, m.q_bb84, m.q_full);
  return kOk;
}

std::vector<qpt::Protocol> configured_protocols(const json& j, const std::string& where) {
  const auto names =
      optional_value(j, "protocols", std::vector<std::string>{"bb84", "mub_full", "devetak_winter"}, where);
  std::vector<qpt::Protocol> out;
  for (const auto& n : names) out.push_back(qpt::protocol_from_string(n));
  if (out.empty()) throw ConfigError("no protocols requested");
  return out;
}

int cmd_keyrate(const Run& run) {
  const qpt::Channel channel = configured_channel(run);
  const json k = section(run.config, "keyrate");
  const auto protocols = configured_protocols(k, "'keyrate'");
  const auto detection = qpt::detection_from_string(optional_value<std::string>(k, "detection", "sort", "'keyrate'"));
  const auto reports = qpt::key_rates(channel, qpt::generate_mubs(channel.dim()), protocols, detection);

  json arr = json::array();
  for (const auto& r : reports) arr.push_back(qpt::io::to_json(r));
  fs::create_directories(run.out);
  write_json(run.out / "keyrate.json", arr);
  save_config(run);
  for (const auto& r : reports) {
    std::printf("%-16s d=%d %-6s", qpt::to_string(r.protocol).c_str(), r.dim, qpt::to_string(r.detection).c_str());
    if (r.q) std::printf("  Q=%.6f", *r.q);
    if (r.key_rate)
      std::printf("  K=%.9f\n", *r.key_rate);
    else
      std::printf("  K=n/a (Q outside formula domain)\n");
  }
  return kOk;
}

int cmd_sweep(const Run& run) {
  const int d = need_dim(run.config);
  const json s = section(run.config, "sweep");
  const json model_spec = section(s, "model");
  const auto kind = optional_value<std::string>(model_spec, "kind", "symmetric", "'sweep.model'");
  qpt::NoiseModel model;
  if (kind == "symmetric")
    model = qpt::symmetric_noise_model(d);
  else if (kind == "rank")
    model = qpt::rank_noise_model(d, required<std::vector<int>>(model_spec, "indices", "'sweep.model'"));
  else
    throw ConfigError("unknown sweep model kind '" + kind + "'");

  std::vector<double> grid;
  if (s.contains("f_grid")) {
    grid = required<std::vector<double>>(s, "f_grid", "'sweep'");
  } else {
    const double lo = optional_value(s, "f_min", 0.5, "'sweep'");
    const double hi = optional_value(s, "f_max", 1.0, "'sweep'");
    const int n = optional_value(s, "points", 51, "'sweep'");
    for (int i = 0; i < n; ++i) grid.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  if (grid.empty()) throw ConfigError("empty fidelity grid");

  const auto protocols = configured_protocols(s, "'sweep'");
  const auto detection = qpt::detection_from_string(optional_value<std::string>(s, "detection", "sort", "'sweep'"));
  const auto rows = qpt::sweep_noise_model(model, grid, qpt::generate_mubs(d), protocols, detection);

  fs::create_directories(run.out);
  write_stream(run.out / "sweep.csv", [&](std::ostream& os) { qpt::io::write_sweep_csv(os, rows); });
  if (optional_value(s, "plot", true, "'sweep'"))
    write_stream(run.out / "sweep.svg", [&](std::ostream& os) {
      qpt::io::write_sweep_svg(os, rows, model.name + " noise, d=" + std::to_string(d));
    });
  save_config(run);
  std::cout << "swept " << model.name << " at d=" << d << " over " << rows.size() << " points -> "
            << (run.out / "sweep.csv").string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum process tomography and key-rate analysis in mutually unbiased bases"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Forward-model a channel and sample tomography counts"},
      {"reconstruct", "Maximum-likelihood reconstruction of a Choi matrix from counts"},
      {"analyze", "Process fidelity, average fidelity, purity and error rates"},
      {"keyrate", "Secret key rates of a channel"},
      {"sweep", "Key rates along a diagonal process-matrix noise family"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Run run;
    try {
      run.config = qpt::io::read_json_file(config_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (!run.config.is_object()) throw ConfigError(config_path + ": top level must be an object");
    run.base = fs::path(config_path).parent_path();
    run.seed = seed ? *seed : optional_value<std::uint64_t>(run.config, "seed", 0, "config");
    run.out = out_dir.empty() ? run.resolve(optional_value<std::string>(run.config, "output_dir", "qpt_out", "config"))
                              : fs::path(out_dir);

    if (command == "simulate") return cmd_simulate(run);
    if (command == "reconstruct") return cmd_reconstruct(run);
    if (command == "analyze") return cmd_analyze(run);
    if (command == "keyrate") return cmd_keyrate(run);
    return cmd_sweep(run);
  } catch (const ConfigError& e) {
    std::cerr << "qpt " << command << ": config error: " << e.what() << "\n";
    return kUsage;
  } catch (const qpt::Error& e) {
    std::cerr << "qpt " << command << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "qpt " << command << ": " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "qpt " << command << ": " << e.what() << "\n";
    return kNumerical;
  }
}
