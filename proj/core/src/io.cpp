#include "admd/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "admd/error.hpp"

namespace admd {

using Json = nlohmann::ordered_json;

namespace {

Json real(double value) {
  if (std::isfinite(value)) return value;
  return format_number(value);
}

double real_from(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto value = parse_number(j.get<std::string>())) return *value;
  }
  fail(ErrorKind::ParseError, "field '" + field + "' is not a number");
}

Json real_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(real(v(i)));
  return out;
}

Eigen::VectorXd real_vector_from(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "field '" + field + "' must be an array");
  Eigen::VectorXd v(Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(Index(i)) = real_from(j[i], field);
  return v;
}

Json complex_vector(const Eigen::VectorXcd& v) {
  return Json{{"re", real_vector(v.real())}, {"im", real_vector(v.imag())}};
}

Eigen::VectorXcd complex_vector_from(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    fail(ErrorKind::ParseError, "field '" + field + "' must hold re/im arrays");
  }
  const Eigen::VectorXd re = real_vector_from(j["re"], field + ".re");
  const Eigen::VectorXd im = real_vector_from(j["im"], field + ".im");
  if (re.size() != im.size()) fail(ErrorKind::ParseError, "field '" + field + "' has re/im of different length");
  Eigen::VectorXcd v(re.size());
  for (Index i = 0; i < v.size(); ++i) v(i) = Complex(re(i), im(i));
  return v;
}

const Json& require(const Json& j, const std::string& field) {
  if (!j.contains(field)) fail(ErrorKind::ParseError, "model is missing field '" + field + "'");
  return j[field];
}

BlockKind block_kind_from(const std::string& name) {
  if (name == "state") return BlockKind::State;
  if (name == "derivative") return BlockKind::Derivative;
  if (name == "shift") return BlockKind::Shift;
  fail(ErrorKind::ParseError, "unknown block kind '" + name + "'");
}

Json quartiles_json(const Quartiles& q) { return Json{{"q1", real(q.q1)}, {"median", real(q.median)}, {"q3", real(q.q3)}}; }

std::string key_cell(int value) { return std::to_string(value); }

}  // namespace

void write_model(std::ostream& out, const DmdModel& model) {
  Json j;
  j["format"] = "admd-model";
  j["version"] = 1;
  j["dim"] = model.dim;
  j["state_variables"] = model.state_variables;
  j["dt"] = model.dt;
  j["steps_per_wave"] = model.steps_per_wave;
  j["names"] = model.names;
  j["augmentation"] = {{"nde", model.augmentation.nde}, {"nts", model.augmentation.nts}, {"scheme", "second-order-backward"}};
  Json layout = Json::array();
  for (const auto& block : model.layout) {
    layout.push_back({{"kind", to_string(block.kind)}, {"order", block.order}, {"row_offset", block.row_offset}, {"rows", block.rows}});
  }
  j["layout"] = layout;
  j["standardization"] = {{"mean", real_vector(model.standardization.mean)}, {"std", real_vector(model.standardization.std)}};
  j["train_start"] = model.train_start;
  j["train_end"] = model.train_end;
  j["time_origin"] = model.time_origin;
  j["eigenvalues"] = complex_vector(model.eigenvalues);
  j["omegas"] = complex_vector(model.omegas);
  j["amplitudes"] = complex_vector(model.amplitudes);
  j["stabilized"] = model.stabilized;
  j["excluded"] = model.excluded;
  Json modes = Json::array();
  for (Index k = 0; k < model.modes.cols(); ++k) modes.push_back(complex_vector(model.modes.col(k)));
  j["modes"] = modes;
  j["initial_state"] = real_vector(model.initial_state);
  out << j.dump(1) << '\n';
}

DmdModel read_model(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "admd-model") fail(ErrorKind::ParseError, "not an admd model document");
  try {
    DmdModel model;
    model.dim = require(j, "dim").get<Index>();
    model.state_variables = require(j, "state_variables").get<Index>();
    model.dt = real_from(require(j, "dt"), "dt");
    model.steps_per_wave = require(j, "steps_per_wave").get<int>();
    model.names = require(j, "names").get<std::vector<std::string>>();
    const auto& aug = require(j, "augmentation");
    model.augmentation.nde = aug.at("nde").get<int>();
    model.augmentation.nts = aug.at("nts").get<int>();
    for (const auto& block : require(j, "layout")) {
      model.layout.push_back({block_kind_from(block.at("kind").get<std::string>()), block.at("order").get<int>(),
                              block.at("row_offset").get<Index>(), block.at("rows").get<Index>()});
    }
    const auto& standardization = require(j, "standardization");
    model.standardization = StandardizationRecord(real_vector_from(standardization.at("mean"), "standardization.mean"),
                                                  real_vector_from(standardization.at("std"), "standardization.std"));
    model.train_start = require(j, "train_start").get<Index>();
    model.train_end = require(j, "train_end").get<Index>();
    model.time_origin = real_from(require(j, "time_origin"), "time_origin");
    model.eigenvalues = complex_vector_from(require(j, "eigenvalues"), "eigenvalues");
    model.omegas = complex_vector_from(require(j, "omegas"), "omegas");
    model.amplitudes = complex_vector_from(require(j, "amplitudes"), "amplitudes");
    model.stabilized = require(j, "stabilized").get<std::vector<bool>>();
    model.excluded = require(j, "excluded").get<std::vector<bool>>();
    const auto& modes = require(j, "modes");
    model.modes.resize(model.dim, Index(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const auto column = complex_vector_from(modes[k], "modes");
      if (column.size() != model.dim) fail(ErrorKind::ParseError, "mode length differs from dim");
      model.modes.col(Index(k)) = column;
    }
    model.initial_state = real_vector_from(require(j, "initial_state"), "initial_state");

    const auto count = std::size_t(model.modes.cols());
    if (std::size_t(model.eigenvalues.size()) != count || std::size_t(model.omegas.size()) != count ||
        std::size_t(model.amplitudes.size()) != count || model.stabilized.size() != count ||
        model.excluded.size() != count) {
      fail(ErrorKind::ParseError, "per-mode arrays disagree on the number of modes");
    }
    if (Index(model.names.size()) != model.state_variables || model.standardization.mean.size() != model.state_variables) {
      fail(ErrorKind::ParseError, "names/standardization do not match state_variables");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const std::string& path, const DmdModel& model) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  write_model(out, model);
}

DmdModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return read_model(in);
}

namespace {

Json box_json(const BoxSummary& box) {
  Json outliers = Json::array();
  for (double v : box.outliers) outliers.push_back(real(v));
  return Json{{"count", box.count},
              {"lower_whisker", real(box.lower_whisker)},
              {"q1", real(box.q1)},
              {"median", real(box.median)},
              {"q3", real(box.q3)},
              {"upper_whisker", real(box.upper_whisker)},
              {"outliers", outliers}};
}

Json config_json(const ExperimentConfig& c) {
  return Json{{"niw_set", c.niw_set},
              {"now_set", c.now_set},
              {"nde_set", c.nde_set},
              {"nts_set", c.nts_set},
              {"samples", c.samples},
              {"seed", c.seed},
              {"stabilize", c.stabilize},
              {"steps_per_wave", c.steps_per_wave},
              {"coupling", c.coupling == WindowCoupling::PerCell ? "per-cell" : "shared-across-now"},
              {"modal", c.modal},
              {"modal_niw", c.modal_niw},
              {"modal_now", c.modal_now}};
}

Json modal_json(const ModeStatistics& stats) {
  Json slots = Json::array();
  for (std::size_t k = 0; k < stats.slots.size(); ++k) {
    const auto& s = stats.slots[k];
    slots.push_back({{"slot", k},
                     {"re_omega", quartiles_json(s.re_omega)},
                     {"im_omega", quartiles_json(s.im_omega)},
                     {"participation", quartiles_json(s.participation)}});
  }
  Json bands = Json::array();
  for (const auto& band : stats.component_bands) {
    Json entries = Json::array();
    for (const auto& q : band.magnitude) entries.push_back(quartiles_json(q));
    bands.push_back({{"slot", band.slot}, {"magnitude", entries}});
  }
  return Json{{"dim", stats.dim}, {"realizations", stats.realizations}, {"top_slots", stats.top_slots},
              {"slots", slots}, {"component_bands", bands}};
}

}  // namespace

void write_report(std::ostream& out, const ExperimentReport& report) {
  Json j;
  j["format"] = "admd-experiment-report";
  j["version"] = 1;
  j["config"] = config_json(report.config);
  j["record"] = {{"steps", report.record_steps}, {"dt", report.dt}, {"names", report.names}};
  j["stabilized"] = report.config.stabilize;
  j["configurations"] = report.cells.size();
  Json cells = Json::array();
  for (const auto& cell : report.cells) {
    Json metrics;
    for (Metric m : kMetrics) metrics[to_string(m)] = box_json(cell.metric(m));
    Json failures = Json::object();
    for (const auto& [kind, count] : cell.failures) failures[kind] = count;
    cells.push_back({{"niw", cell.key.niw},
                     {"now", cell.key.now},
                     {"nde", cell.key.nde},
                     {"nts", cell.key.nts},
                     {"evaluated", cell.evaluated},
                     {"failed", cell.failed},
                     {"failures", failures},
                     {"metrics", metrics}});
  }
  j["cells"] = cells;
  Json best = Json::array();
  for (int niw : report.config.niw_set) {
    for (int now : report.config.now_set) {
      try {
        const auto [nde, nts] = best_setup(report, niw, now);
        const auto* cell = report.find({niw, now, nde, nts});
        best.push_back({{"niw", niw}, {"now", now}, {"nde", nde}, {"nts", nts},
                        {"median_nrmse", real(cell->metric(Metric::Nrmse).median)}});
      } catch (const Error&) {
        best.push_back({{"niw", niw}, {"now", now}, {"nde", nullptr}, {"nts", nullptr}, {"median_nrmse", nullptr}});
      }
    }
  }
  j["best_setups"] = best;
  Json modal = Json::array();
  for (const auto& m : report.modal) {
    modal.push_back({{"label", m.label},
                     {"niw", m.key.niw},
                     {"now", m.key.now},
                     {"nde", m.key.nde},
                     {"nts", m.key.nts},
                     {"failed", m.failed},
                     {"statistics", modal_json(m.statistics)}});
  }
  j["modal"] = modal;
  out << j.dump(1) << '\n';
}

Table summary_table(const ExperimentReport& report) {
  Table table;
  table.columns = {"niw", "now", "nde", "nts", "metric", "statistic", "value"};
  for (const auto& cell : report.cells) {
    for (Metric m : kMetrics) {
      const auto& box = cell.metric(m);
      const std::pair<const char*, double> stats[] = {{"lower_whisker", box.lower_whisker}, {"q1", box.q1},
                                                      {"median", box.median},               {"q3", box.q3},
                                                      {"upper_whisker", box.upper_whisker}};
      for (const auto& [name, value] : stats) {
        table.add_row({key_cell(cell.key.niw), key_cell(cell.key.now), key_cell(cell.key.nde), key_cell(cell.key.nts),
                       to_string(m), name, format_number(value)});
      }
    }
  }
  return table;
}

Table accounting_table(const ExperimentReport& report) {
  Table table;
  table.columns = {"niw", "now", "nde", "nts", "evaluated", "failed", "failure_kinds"};
  for (const auto& cell : report.cells) {
    std::string kinds;
    for (const auto& [kind, count] : cell.failures) {
      if (!kinds.empty()) kinds += ';';
      kinds += kind + ":" + std::to_string(count);
    }
    table.add_row({key_cell(cell.key.niw), key_cell(cell.key.now), key_cell(cell.key.nde), key_cell(cell.key.nts),
                   std::to_string(cell.evaluated), std::to_string(cell.failed), kinds});
  }
  return table;
}

Table best_setup_table(const ExperimentReport& report) {
  Table table;
  table.columns = {"niw", "now", "nde", "nts", "median_nrmse"};
  for (int niw : report.config.niw_set) {
    for (int now : report.config.now_set) {
      try {
        const auto [nde, nts] = best_setup(report, niw, now);
        const auto* cell = report.find({niw, now, nde, nts});
        table.add_row({key_cell(niw), key_cell(now), key_cell(nde), key_cell(nts),
                       format_number(cell->metric(Metric::Nrmse).median)});
      } catch (const Error&) {
        table.add_row({key_cell(niw), key_cell(now), "", "", "nan"});
      }
    }
  }
  return table;
}

Table outlier_table(const ExperimentReport& report) {
  Table table;
  table.columns = {"niw", "now", "nde", "nts", "metric", "value"};
  for (const auto& cell : report.cells) {
    for (Metric m : kMetrics) {
      for (double v : cell.metric(m).outliers) {
        table.add_row({key_cell(cell.key.niw), key_cell(cell.key.now), key_cell(cell.key.nde), key_cell(cell.key.nts),
                       to_string(m), format_number(v)});
      }
    }
  }
  return table;
}

Table mode_table(const DmdModel& unsorted) {
  const DmdModel model = sort_modes(unsorted);
  Table table;
  table.columns = {"slot", "re_lambda", "im_lambda", "re_omega", "im_omega", "frequency_per_wave",
                   "participation", "stabilized", "excluded"};
  Eigen::VectorXd share = Eigen::VectorXd::Zero(model.modes_count());
  try {
    share = participation(model);
  } catch (const Error&) {
  }
  const double wave_period = model.dt * model.steps_per_wave;
  for (Index k = 0; k < model.modes_count(); ++k) {
    const Complex omega = model.omegas(k);
    table.add_row({std::to_string(k), format_number(model.eigenvalues(k).real()), format_number(model.eigenvalues(k).imag()),
                   format_number(omega.real()), format_number(omega.imag()),
                   format_number(omega.imag() * wave_period / (2.0 * std::numbers::pi)), format_number(share(k)),
                   model.stabilized[std::size_t(k)] ? "1" : "0", model.excluded[std::size_t(k)] ? "1" : "0"});
  }
  return table;
}

Table mode_statistics_table(const ModeStatistics& stats) {
  Table table;
  table.columns = {"slot", "re_omega_q1", "re_omega_median", "re_omega_q3", "im_omega_q1", "im_omega_median",
                   "im_omega_q3", "participation_q1", "participation_median", "participation_q3"};
  for (std::size_t k = 0; k < stats.slots.size(); ++k) {
    const auto& s = stats.slots[k];
    table.add_row({std::to_string(k), format_number(s.re_omega.q1), format_number(s.re_omega.median),
                   format_number(s.re_omega.q3), format_number(s.im_omega.q1), format_number(s.im_omega.median),
                   format_number(s.im_omega.q3), format_number(s.participation.q1),
                   format_number(s.participation.median), format_number(s.participation.q3)});
  }
  return table;
}

Table component_bands_table(const ModeStatistics& stats, const BlockLayout& layout,
                            const std::vector<std::string>& names) {
  Table table;
  table.columns = {"slot", "entry", "block", "order", "variable", "magnitude_q1", "magnitude_median", "magnitude_q3"};
  for (const auto& band : stats.component_bands) {
    for (std::size_t i = 0; i < band.magnitude.size(); ++i) {
      std::string block = "";
      std::string order = "";
      std::string variable = "";
      for (const auto& b : layout) {
        if (Index(i) >= b.row_offset && Index(i) < b.row_offset + b.rows) {
          block = to_string(b.kind);
          order = std::to_string(b.order);
          const auto local = std::size_t(Index(i) - b.row_offset);
          variable = local < names.size() ? names[local] : std::to_string(local);
        }
      }
      const auto& q = band.magnitude[i];
      table.add_row({std::to_string(band.slot), std::to_string(i), block, order, variable, format_number(q.q1),
                     format_number(q.median), format_number(q.q3)});
    }
  }
  return table;
}

namespace {

std::vector<int> parse_int_list(const std::string& value, std::size_t line, const std::string& key) {
  std::vector<int> out;
  if (trim(value).empty()) {
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field '" + key + "' is an empty list");
  }
  for (const auto& item : split(value, ',')) {
    auto number = parse_number(item);
    if (!number || *number != std::floor(*number) || std::abs(*number) > 1e9) {
      fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field '" + key + "' has non-integer entry '" +
                                      item + "'");
    }
    out.push_back(int(*number));
  }
  return out;
}

long long parse_integer(const std::string& value, std::size_t line, const std::string& key) {
  auto list = parse_int_list(value, line, key);
  if (list.size() != 1) fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field '" + key + "' takes one integer");
  return list.front();
}

bool parse_bool(const std::string& value, std::size_t line, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field '" + key + "' expects true or false");
}

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + std::to_string(values[i]);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key == "niw_set") {
      config.niw_set = parse_int_list(value, line, key);
    } else if (key == "now_set") {
      config.now_set = parse_int_list(value, line, key);
    } else if (key == "nde_set") {
      config.nde_set = parse_int_list(value, line, key);
    } else if (key == "nts_set") {
      config.nts_set = parse_int_list(value, line, key);
    } else if (key == "samples") {
      config.samples = Index(parse_integer(value, line, key));
    } else if (key == "seed") {
      auto number = parse_number(value);
      if (!number || *number < 0 || *number != std::floor(*number)) {
        fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field 'seed' must be a nonnegative integer");
      }
      config.seed = std::uint64_t(*number);
    } else if (key == "stabilize") {
      config.stabilize = parse_bool(value, line, key);
    } else if (key == "steps_per_wave") {
      config.steps_per_wave = int(parse_integer(value, line, key));
    } else if (key == "coupling") {
      if (value == "per-cell") {
        config.coupling = WindowCoupling::PerCell;
      } else if (value == "shared-across-now") {
        config.coupling = WindowCoupling::SharedAcrossNow;
      } else {
        fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": field 'coupling' expects per-cell or shared-across-now");
      }
    } else if (key == "modal") {
      config.modal = parse_bool(value, line, key);
    } else if (key == "modal_niw") {
      config.modal_niw = int(parse_integer(value, line, key));
    } else if (key == "modal_now") {
      config.modal_now = int(parse_integer(value, line, key));
    } else {
      fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": unknown field '" + key + "'");
    }
  }
  try {
    config.validate();
  } catch (const Error& e) {
    fail(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "niw_set = " << join(c.niw_set) << '\n'
      << "now_set = " << join(c.now_set) << '\n'
      << "nde_set = " << join(c.nde_set) << '\n'
      << "nts_set = " << join(c.nts_set) << '\n'
      << "samples = " << c.samples << '\n'
      << "seed = " << c.seed << '\n'
      << "stabilize = " << (c.stabilize ? "true" : "false") << '\n'
      << "steps_per_wave = " << c.steps_per_wave << '\n'
      << "coupling = " << (c.coupling == WindowCoupling::PerCell ? "per-cell" : "shared-across-now") << '\n'
      << "modal = " << (c.modal ? "true" : "false") << '\n'
      << "modal_niw = " << c.modal_niw << '\n'
      << "modal_now = " << c.modal_now << '\n';
  return out.str();
}

}  // namespace admd
