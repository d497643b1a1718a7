#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "admd/dmd.hpp"
#include "admd/error.hpp"
#include "admd/experiment.hpp"
#include "admd/io.hpp"
#include "admd/metrics.hpp"
#include "admd/modal.hpp"
#include "admd/synthetic.hpp"
#include "admd/text.hpp"
#include "admd/timeseries.hpp"

namespace admd::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct FitArgs {
  std::string csv;
  int niw = 4;
  int nde = 0;
  int nts = 0;
  int steps_per_wave = 32;
  std::optional<long long> start;
  bool no_stabilize = false;
  std::string out;
};

struct ForecastArgs {
  std::string model;
  std::string csv;
  int horizon_waves = 1;
  std::string out;
};

struct ExperimentArgs {
  std::string csv;
  std::string config_file;
  std::string out_dir;
  unsigned jobs = 1;
};

struct ModesArgs {
  std::vector<std::string> models;
  std::string participation = "amplitude";
  long long steps = 1;
  std::string out;
};

struct SynthArgs {
  std::string kind;
  long long variables = 1;
  long long steps = 10000;
  std::uint64_t seed = 1;
  double dt = 0.1;
  int steps_per_wave = 32;
  std::optional<double> snr_db;
  std::string out;
};

/// Collects what goes into manifest.json.
class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv) : started_(Clock::now()) {
    doc_["command"] = std::move(command);
    Json args = Json::array();
    for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
    doc_["arguments"] = args;
    doc_["version"] = ADMD_VERSION;
    doc_["inputs"] = Json::array();
    doc_["config"] = Json::object();
    doc_["seed"] = nullptr;
    doc_["outputs"] = Json::array();
  }

  void input(const std::string& path) { doc_["inputs"].push_back(path); }
  void output(const fs::path& path) { doc_["outputs"].push_back(path.string()); }
  Json& config() { return doc_["config"]; }
  void seed(std::uint64_t value) { doc_["seed"] = value; }

  void write(const fs::path& dir) {
    const auto path = dir / "manifest.json";
    output(path);
    doc_["duration_seconds"] = std::chrono::duration<double>(Clock::now() - started_).count();
    std::ofstream out(path);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
    out << doc_.dump(1) << '\n';
  }

 private:
  Json doc_;
  Clock::time_point started_;
};

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::InvalidInput, "cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) fail(ErrorKind::InvalidInput, "no such file: '" + path + "'");
}

template <typename Write>
void write_file(Manifest& manifest, const fs::path& path, Write&& write) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
  write(out);
  manifest.output(path);
}

void write_table_file(Manifest& manifest, const fs::path& path, const Table& table) {
  write_file(manifest, path, [&](std::ostream& out) { write_table(out, table); });
}

Json number(double value) {
  if (std::isfinite(value)) return value;
  return format_number(value);
}

Json number_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& name : names) out += (out.empty() ? "" : ",") + name;
  return out;
}

int cmd_fit(const FitArgs& args, int argc, char** argv, std::ostream& out) {
  Manifest manifest("fit", argc, argv);
  require_file(args.csv);
  manifest.input(args.csv);
  const auto record = load_csv(args.csv, args.steps_per_wave);
  const AugmentationSpec spec{args.nde, args.nts};
  const Index start = args.start ? Index(*args.start) : spec.lead_required();
  FitOptions options;
  options.stabilize = !args.no_stabilize;
  const auto model = fit_record_window(record, start, args.niw, spec, options);

  auto& config = manifest.config();
  config = {{"niw", args.niw},   {"nde", args.nde},   {"nts", args.nts}, {"steps_per_wave", args.steps_per_wave},
            {"start", start},    {"stabilize", options.stabilize},     {"complete_null_space", options.complete_null_space}};
  const auto dir = prepare_dir(args.out);
  write_file(manifest, dir / "model.json", [&](std::ostream& s) { write_model(s, model); });
  manifest.write(dir);
  out << "fitted " << model.modes_count() << " modes on steps [" << model.train_start << ", " << model.train_end
      << ") of " << record.steps() << "; " << (model.any_stabilized() ? "some modes stabilized" : "no mode stabilized")
      << '\n';
  return kExitOk;
}

int cmd_forecast(const ForecastArgs& args, int argc, char** argv, std::ostream& out) {
  Manifest manifest("forecast", argc, argv);
  require_file(args.model);
  require_file(args.csv);
  manifest.input(args.model);
  manifest.input(args.csv);
  manifest.config() = {{"horizon_waves", args.horizon_waves}};

  const auto model = load_model(args.model);
  const auto record = load_csv(args.csv, model.steps_per_wave);
  if (record.names() != model.names) {
    fail(ErrorKind::DimensionMismatch, "csv variables (" + joined(record.names()) + ") do not match the model (" +
                                           joined(model.names) + ")");
  }
  if (std::abs(record.dt() - model.dt) > 1e-6 * model.dt) {
    fail(ErrorKind::InvalidInput, "csv time step " + format_number(record.dt()) + " differs from the model's " +
                                      format_number(model.dt));
  }

  const Index horizon = Index(args.horizon_waves) * model.steps_per_wave;
  const Eigen::MatrixXd predicted = forecast(model, horizon);
  const double wave = model.dt * model.steps_per_wave;
  const double first_time = model.time_origin + double(model.train_end) * model.dt;
  const Index first = Index(std::llround((first_time - record.t0()) / model.dt));

  // Measured values are taken where the csv covers the forecast, standardized
  // with the model's training statistics.
  Index covered_begin = std::clamp<Index>(-first, 0, horizon);
  Index covered_end = std::clamp<Index>(record.steps() - first, 0, horizon);
  if (covered_end < covered_begin) covered_end = covered_begin;
  Eigen::MatrixXd measured = Eigen::MatrixXd::Constant(model.state_variables, horizon, std::nan(""));
  if (covered_end > covered_begin) {
    measured.middleCols(covered_begin, covered_end - covered_begin) = model.standardization.apply(
        record.values().middleCols(first + covered_begin, covered_end - covered_begin));
  }

  std::optional<MetricReport> metrics;
  const Index scored = covered_end - covered_begin;
  if (scored >= 2) {
    metrics = evaluate(predicted.middleCols(covered_begin, scored), measured.middleCols(covered_begin, scored));
  }

  const auto dir = prepare_dir(args.out);
  Table table;
  table.columns = {"t/T_e", "variable", "predicted", "measured"};
  for (Index j = 0; j < horizon; ++j) {
    const double t = (first_time + double(j) * model.dt) / wave;
    for (Index i = 0; i < model.state_variables; ++i) {
      table.add_row({format_number(t), model.names[std::size_t(i)], format_number(predicted(i, j)),
                     format_number(measured(i, j))});
    }
  }
  write_table_file(manifest, dir / "forecast.csv", table);
  if (metrics) {
    Json doc;
    doc["steps_scored"] = scored;
    doc["first_scored_step"] = model.train_end + covered_begin;
    doc["nrmse"] = number(metrics->nrmse);
    doc["pearson_r"] = number(metrics->pearson_r);
    doc["aam"] = number(metrics->aam);
    doc["nammae"] = number(metrics->nammae);
    doc["per_variable"] = {{"names", model.names},
                           {"nrmse", number_vector(metrics->nrmse_per_variable)},
                           {"pearson_r", number_vector(metrics->pearson_per_variable)},
                           {"aam", number_vector(metrics->aam_per_variable)},
                           {"nammae", number_vector(metrics->nammae_per_variable)}};
    write_file(manifest, dir / "metrics.json", [&](std::ostream& s) { s << doc.dump(1) << '\n'; });
    out << "nrmse " << format_number(metrics->nrmse) << ", r " << format_number(metrics->pearson_r) << ", aam "
        << format_number(metrics->aam) << ", nammae " << format_number(metrics->nammae) << " over " << scored
        << " steps\n";
  } else {
    out << "forecast of " << horizon << " steps written; no measured data to score\n";
  }
  manifest.write(dir);
  return kExitOk;
}

Json config_json(const ExperimentConfig& c) {
  std::istringstream text(format_config(c));
  Json out = Json::object();
  std::string line;
  while (std::getline(text, line)) {
    const auto eq = line.find('=');
    out[std::string(trim(std::string_view(line).substr(0, eq)))] = std::string(trim(std::string_view(line).substr(eq + 1)));
  }
  return out;
}

int cmd_experiment(const ExperimentArgs& args, int argc, char** argv, std::ostream& out) {
  Manifest manifest("experiment", argc, argv);
  require_file(args.csv);
  manifest.input(args.csv);
  ExperimentConfig config;
  if (!args.config_file.empty()) {
    require_file(args.config_file);
    manifest.input(args.config_file);
    config = load_config(args.config_file);
  }
  config.validate();
  manifest.config() = config_json(config);
  manifest.config()["jobs"] = args.jobs;
  manifest.seed(config.seed);

  const auto record = load_csv(args.csv, config.steps_per_wave);
  const auto report = run(record, config, {args.jobs});

  const auto dir = prepare_dir(args.out_dir);
  write_file(manifest, dir / "report.json", [&](std::ostream& s) { write_report(s, report); });
  write_table_file(manifest, dir / "summary.csv", summary_table(report));
  write_table_file(manifest, dir / "accounting.csv", accounting_table(report));
  write_table_file(manifest, dir / "best_setups.csv", best_setup_table(report));
  write_table_file(manifest, dir / "outliers.csv", outlier_table(report));
  for (const auto& modal : report.modal) {
    const AugmentationSpec spec{modal.key.nde, modal.key.nts};
    write_table_file(manifest, dir / ("modes_" + modal.label + "_statistics.csv"),
                     mode_statistics_table(modal.statistics));
    write_table_file(manifest, dir / ("modes_" + modal.label + "_bands.csv"),
                     component_bands_table(modal.statistics, make_layout(record.variables(), spec), record.names()));
  }
  manifest.write(dir);

  Index failed = 0;
  for (const auto& cell : report.cells) failed += cell.failed;
  out << report.cells.size() << " configurations x " << config.samples << " windows; " << failed
      << " failed window evaluations\n";
  return kExitOk;
}

int cmd_modes(const ModesArgs& args, int argc, char** argv, std::ostream& out) {
  Manifest manifest("modes", argc, argv);
  ParticipationKind kind = ParticipationKind::Amplitude;
  if (args.participation == "energy") kind = ParticipationKind::TimeIntegratedEnergy;
  manifest.config() = {{"participation", args.participation}, {"steps", args.steps}};

  std::vector<DmdModel> models;
  for (const auto& path : args.models) {
    require_file(path);
    manifest.input(path);
    models.push_back(sort_modes(load_model(path)));
  }
  for (std::size_t m = 1; m < models.size(); ++m) {
    if (models[m].dim != models[0].dim || models[m].modes_count() != models[0].modes_count()) {
      fail(ErrorKind::DimensionMismatch, "model '" + args.models[m] + "' has dimension " +
                                             std::to_string(models[m].dim) + " and " +
                                             std::to_string(models[m].modes_count()) + " modes; '" +
                                             args.models[0] + "' has " + std::to_string(models[0].dim) + " and " +
                                             std::to_string(models[0].modes_count()));
    }
  }

  const auto dir = prepare_dir(args.out);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto name = models.size() == 1 ? std::string("modes.csv") : "modes_" + std::to_string(m) + ".csv";
    write_table_file(manifest, dir / name, mode_table(models[m]));
  }
  if (models.size() > 1) {
    const auto stats = aggregate(models, kind, Index(args.steps));
    write_table_file(manifest, dir / "mode_statistics.csv", mode_statistics_table(stats));
    write_table_file(manifest, dir / "component_bands.csv",
                     component_bands_table(stats, models[0].layout, models[0].names));
  }
  manifest.write(dir);
  out << models.size() << " model(s), " << models[0].modes_count() << " modes each\n";
  return kExitOk;
}

int cmd_synth(const SynthArgs& args, int argc, char** argv, std::ostream& out) {
  Manifest manifest("synth", argc, argv);
  SyntheticOptions options;
  options.dt = args.dt;
  options.steps_per_wave = args.steps_per_wave;
  options.snr_db = args.snr_db;
  const auto kind = parse_synthetic_kind(args.kind);
  const auto series = generate_synthetic(kind, Index(args.variables), Index(args.steps), args.seed, options);
  manifest.config() = {{"kind", to_string(kind)}, {"variables", args.variables}, {"steps", args.steps},
                       {"dt", args.dt},           {"steps_per_wave", args.steps_per_wave}};
  if (args.snr_db) manifest.config()["snr_db"] = *args.snr_db;
  manifest.seed(args.seed);

  const fs::path path(args.out);
  if (path.has_parent_path()) prepare_dir(path.parent_path().string());
  write_file(manifest, path, [&](std::ostream& s) { write_csv(s, series); });
  manifest.write(path.has_parent_path() ? path.parent_path() : fs::path("."));
  out << "wrote " << series.steps() << " steps of " << series.variables() << " variable(s) to " << path.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic mode decomposition with state augmentation for time-series forecasting", "admd"};
  app.set_version_flag("--version", ADMD_VERSION);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on one training window of a CSV record");
  fit_cmd->add_option("csv", fit.csv, "Input record")->required();
  fit_cmd->add_option("--niw", fit.niw, "Training length in waves")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--nde", fit.nde, "Number of time derivatives")->check(CLI::Range(0, kMaxDerivatives));
  fit_cmd->add_option("--nts", fit.nts, "Number of time-shifted copies")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--steps-per-wave", fit.steps_per_wave, "Samples per encounter wave")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--start", fit.start, "First training step (default: earliest with enough history)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_flag("--no-stabilize", fit.no_stabilize, "Keep growing modes as fitted");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  ForecastArgs fc;
  auto* fc_cmd = app.add_subcommand("forecast", "Forecast from a fitted model and score it against a record");
  fc_cmd->add_option("model", fc.model, "Model file")->required();
  fc_cmd->add_option("csv", fc.csv, "Record holding the measured continuation")->required();
  fc_cmd->add_option("--horizon-waves", fc.horizon_waves, "Forecast length in waves")->check(CLI::NonNegativeNumber);
  fc_cmd->add_option("--out", fc.out, "Output directory")->required();

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run the full-factorial forecasting sweep");
  ex_cmd->add_option("csv", ex.csv, "Input record")->required();
  ex_cmd->add_option("--config-file", ex.config_file, "Sweep configuration (key = value)");
  ex_cmd->add_option("--out-dir", ex.out_dir, "Output directory")->required();
  ex_cmd->add_option("--jobs", ex.jobs, "Worker threads (0: all cores); results do not depend on it");

  ModesArgs md;
  auto* md_cmd = app.add_subcommand("modes", "Sorted mode tables and statistics over models");
  md_cmd->add_option("models", md.models, "Model files")->required();
  md_cmd->add_option("--participation", md.participation, "amplitude or energy")
      ->check(CLI::IsMember({"amplitude", "energy"}));
  md_cmd->add_option("--steps", md.steps, "Steps integrated by the energy participation")->check(CLI::PositiveNumber);
  md_cmd->add_option("--out", md.out, "Output directory")->required();

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Generate a synthetic record");
  sy_cmd->add_option("kind", sy.kind, "single-tone, two-tone, quasi-periodic or tone-noise")
      ->required()
      ->check(CLI::IsMember({"single-tone", "two-tone", "quasi-periodic", "tone-noise"}));
  sy_cmd->add_option("--variables", sy.variables, "Number of variables")->check(CLI::PositiveNumber);
  sy_cmd->add_option("--steps", sy.steps, "Number of samples")->check(CLI::PositiveNumber);
  sy_cmd->add_option("--seed", sy.seed, "Generator seed");
  sy_cmd->add_option("--dt", sy.dt, "Time step")->check(CLI::PositiveNumber);
  sy_cmd->add_option("--steps-per-wave", sy.steps_per_wave, "Samples per wave")->check(CLI::PositiveNumber);
  sy_cmd->add_option("--snr-db", sy.snr_db, "Add white noise at this signal-to-noise ratio");
  sy_cmd->add_option("--out", sy.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, argc, argv, out);
    if (*fc_cmd) return cmd_forecast(fc, argc, argv, out);
    if (*ex_cmd) return cmd_experiment(ex, argc, argv, out);
    if (*md_cmd) return cmd_modes(md, argc, argv, out);
    if (*sy_cmd) return cmd_synth(sy, argc, argv, out);
  } catch (const Error& e) {
    err << "admd: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_numerical(e.kind()) ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    err << "admd: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace admd::cli
