#include "admd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <thread>

#include "admd/augmentation.hpp"
#include "admd/dmd.hpp"
#include "admd/error.hpp"
#include "admd/metrics.hpp"

namespace admd {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::Nrmse: return "nrmse";
    case Metric::Pearson: return "r";
    case Metric::Aam: return "aam";
    case Metric::Nammae: return "nammae";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto check_set = [](const std::vector<int>& set, const char* name, int lo, int hi) {
    if (set.empty()) fail(ErrorKind::InvalidInput, std::string(name) + " is empty");
    for (int v : set) {
      if (v < lo || v > hi) {
        fail(ErrorKind::InvalidInput, std::string(name) + " value " + std::to_string(v) + " outside " +
                                          std::to_string(lo) + ".." + std::to_string(hi));
      }
    }
    auto sorted = set;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(ErrorKind::InvalidInput, std::string(name) + " has duplicate values");
    }
  };
  check_set(niw_set, "niw_set", 1, 1 << 20);
  check_set(now_set, "now_set", 1, 1 << 20);
  check_set(nde_set, "nde_set", 0, kMaxDerivatives);
  check_set(nts_set, "nts_set", 0, 1 << 20);
  if (samples < 1) fail(ErrorKind::InvalidInput, "samples must be positive");
  if (steps_per_wave < 1) fail(ErrorKind::InvalidInput, "steps_per_wave must be positive");
  if (modal_niw != 0 && std::find(niw_set.begin(), niw_set.end(), modal_niw) == niw_set.end()) {
    fail(ErrorKind::InvalidInput, "modal_niw is not in niw_set");
  }
  if (modal_now != 0 && std::find(now_set.begin(), now_set.end(), modal_now) == now_set.end()) {
    fail(ErrorKind::InvalidInput, "modal_now is not in now_set");
  }
}

Index ExperimentConfig::configurations() const {
  return Index(niw_set.size() * now_set.size() * nde_set.size() * nts_set.size());
}

Index ExperimentConfig::max_lead() const {
  Index lead = 0;
  for (int nde : nde_set) {
    for (int nts : nts_set) lead = std::max(lead, AugmentationSpec{nde, nts}.lead_required());
  }
  return lead;
}

BoxSummary BoxSummary::from(std::vector<double> samples) {
  BoxSummary box;
  box.count = Index(samples.size());
  if (samples.empty()) {
    const double nan = std::nan("");
    box.lower_whisker = box.q1 = box.median = box.q3 = box.upper_whisker = nan;
    return box;
  }
  std::sort(samples.begin(), samples.end());
  box.q1 = quantile(samples, 0.25);
  box.median = quantile(samples, 0.5);
  box.q3 = quantile(samples, 0.75);
  const double reach = 1.5 * (box.q3 - box.q1);
  const double low_fence = box.q1 - reach;
  const double high_fence = box.q3 + reach;
  box.lower_whisker = box.q1;
  box.upper_whisker = box.q3;
  for (double v : samples) {
    if (v < low_fence || v > high_fence) {
      box.outliers.push_back(v);
    } else {
      box.lower_whisker = std::min(box.lower_whisker, v);
      box.upper_whisker = std::max(box.upper_whisker, v);
    }
  }
  return box;
}

const CellResult* ExperimentReport::find(const ConfigKey& key) const {
  for (const auto& cell : cells) {
    if (cell.key == key) return &cell;
  }
  return nullptr;
}

std::uint64_t group_seed(std::uint64_t seed, int niw, int now) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(niw), std::uint32_t(now)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t(words[0]) << 32) | words[1];
}

namespace {

struct Outcome {
  std::array<double, 4> values{};
  std::optional<ErrorKind> failure;
};

/// One window draw shared by a set of NOW values.
struct Group {
  int niw = 0;
  int horizon_waves = 0;
  std::vector<int> nows;
  std::vector<WindowSpec> windows;
};

std::vector<Group> make_groups(const TimeSeries& record, const ExperimentConfig& config, Index lead) {
  std::vector<Group> groups;
  const int max_now = *std::max_element(config.now_set.begin(), config.now_set.end());
  for (int niw : config.niw_set) {
    auto draw = [&](int now) {
      const auto range = valid_starts(record.steps(), config.steps_per_wave, niw, now, lead);
      if (range.count() == 0) {
        fail(ErrorKind::ConfigInfeasible, "no window with lead " + std::to_string(lead) + ", niw " +
                                              std::to_string(niw) + ", now " + std::to_string(now) +
                                              " fits a record of " + std::to_string(record.steps()) + " steps");
      }
      return sample_windows(record, niw, now, lead, config.samples, group_seed(config.seed, niw, now));
    };
    if (config.coupling == WindowCoupling::SharedAcrossNow) {
      groups.push_back({niw, max_now, config.now_set, draw(max_now)});
    } else {
      for (int now : config.now_set) groups.push_back({niw, now, {now}, draw(now)});
    }
  }
  return groups;
}

template <typename Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = unsigned(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
}

/// Standardized slices of one window: statistics from the training part.
struct PreparedWindow {
  TimeSeries history;
  TimeSeries train;
  TimeSeries test;
};

PreparedWindow prepare(const TimeSeries& record, const WindowSpec& w) {
  const int spw = record.steps_per_wave();
  const Index begin = w.start - w.lead;
  const Index end = w.start + w.train_steps(spw) + w.test_steps(spw);
  const auto standardized = standardize(record.slice(begin, end), {w.lead, w.lead + w.train_steps(spw)});
  const auto& s = standardized.series;
  return {s.slice(0, w.lead), s.slice(w.lead, w.lead + w.train_steps(spw)),
          s.slice(w.lead + w.train_steps(spw), s.steps())};
}

DmdModel fit_window(const PreparedWindow& window, const AugmentationSpec& spec, bool stabilize_modes,
                    bool complete_null_space) {
  const Index lead = spec.lead_required();
  const auto history = window.history.slice(window.history.steps() - lead, window.history.steps());
  const auto pair = build_snapshots(window.train, history, spec);
  return fit_model(pair, window.train.dt(), {stabilize_modes, complete_null_space});
}

// One window's fits share a row compression of the largest augmentation.
// Specs whose rows span fewer columns of it than there are snapshots fit
// from the compression, the rest directly.
class WindowFitter {
 public:
  WindowFitter(const PreparedWindow& window, const AugmentationSpec& full, const std::vector<AugmentationSpec>& specs)
      : window_(window), full_(full) {
    const Index n = window.train.variables();
    const Index columns = window.train.steps() - 1;
    const Index widest = std::min(full.dimension(n), columns);
    for (const auto& spec : specs) {
      // Width of the spec's rows in L: up to the end of its last block.
      const Index width = spec.nts > 0 ? n * (1 + full.nde + spec.nts) : n * (1 + spec.nde);
      if (std::min(width, widest) < columns) {
        try {
          const auto pair = build_snapshots(window.train, history(full), full);
          compression_ = compress_rows(pair);
        } catch (const Error&) {
        }
        break;
      }
    }
  }

  DmdModel fit(const AugmentationSpec& spec, bool stabilize_modes, bool complete_null_space = false) const {
    if (compression_) {
      const auto rows = layout_rows(window_.train.variables(), full_, spec);
      if (compression_->width(rows) < compression_->columns) {
        const auto pair = build_snapshots(window_.train, history(spec), spec);
        return fit_model(pair, *compression_, rows, window_.train.dt(), {stabilize_modes, complete_null_space});
      }
    }
    return fit_window(window_, spec, stabilize_modes, complete_null_space);
  }

 private:
  TimeSeries history(const AugmentationSpec& spec) const {
    const Index lead = spec.lead_required();
    return window_.history.slice(window_.history.steps() - lead, window_.history.steps());
  }

  const PreparedWindow& window_;
  AugmentationSpec full_;
  std::optional<RowCompression> compression_;
};

}  // namespace

DmdModel fit_record_window(const TimeSeries& record, Index start, int niw, const AugmentationSpec& spec,
                           const FitOptions& options) {
  spec.validate();
  if (niw < 1) fail(ErrorKind::InvalidInput, "niw must be positive");
  const Index lead = spec.lead_required();
  const Index train = Index(niw) * record.steps_per_wave();
  if (start < lead) {
    fail(ErrorKind::InsufficientHistory, "start step " + std::to_string(start) + " leaves fewer than " +
                                             std::to_string(lead) + " history steps");
  }
  if (start + train > record.steps()) {
    fail(ErrorKind::OutOfBounds, "training window [" + std::to_string(start) + ", " + std::to_string(start + train) +
                                     ") exceeds the record of " + std::to_string(record.steps()) + " steps");
  }
  const auto window = prepare(record, {start, niw, 0, lead});
  auto model = fit_model(build_snapshots(window.train, window.history, spec), record.dt(), options);
  model.augmentation = spec;
  model.standardization = standardize(record.slice(start, start + train)).record;
  model.names = record.names();
  model.steps_per_wave = record.steps_per_wave();
  model.train_start = start;
  model.train_end = start + train;
  model.time_origin = record.t0();
  return model;
}

ExperimentReport run(const TimeSeries& ts, const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const TimeSeries record(ts.values(), ts.dt(), ts.names(), config.steps_per_wave, ts.t0());
  const Index lead = config.max_lead();
  const auto groups = make_groups(record, config, lead);
  const int spw = config.steps_per_wave;

  std::vector<AugmentationSpec> specs;
  for (int nde : config.nde_set) {
    for (int nts : config.nts_set) specs.push_back({nde, nts});
  }
  const AugmentationSpec full{*std::max_element(config.nde_set.begin(), config.nde_set.end()),
                              *std::max_element(config.nts_set.begin(), config.nts_set.end())};

  // Cell layout: niw, now, nde, nts nested in config order.
  auto now_index = [&](int now) {
    return std::size_t(std::find(config.now_set.begin(), config.now_set.end(), now) - config.now_set.begin());
  };
  auto niw_index = [&](int niw) {
    return std::size_t(std::find(config.niw_set.begin(), config.niw_set.end(), niw) - config.niw_set.begin());
  };
  const std::size_t per_now = specs.size();
  const std::size_t per_niw = config.now_set.size() * per_now;
  const std::size_t samples = std::size_t(config.samples);
  std::vector<std::vector<Outcome>> outcomes(config.niw_set.size() * per_niw, std::vector<Outcome>(samples));

  std::vector<std::pair<std::size_t, std::size_t>> tasks;  // group, window
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t w = 0; w < samples; ++w) tasks.emplace_back(g, w);
  }

  parallel_for(tasks.size(), options.jobs, [&](std::size_t t) {
    const auto [g, w] = tasks[t];
    const Group& group = groups[g];
    const std::size_t niw_base = niw_index(group.niw) * per_niw;
    auto cell_of = [&](int now, std::size_t s) { return niw_base + now_index(now) * per_now + s; };

    std::optional<PreparedWindow> window;
    std::optional<ErrorKind> window_failure;
    try {
      window = prepare(record, group.windows[w]);
    } catch (const Error& e) {
      window_failure = e.kind();
    }

    std::optional<WindowFitter> fitter;
    if (window) fitter.emplace(*window, full, specs);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      std::optional<Eigen::MatrixXd> predicted;
      std::optional<ErrorKind> fit_failure = window_failure;
      if (!fit_failure) {
        try {
          const auto model = fitter->fit(specs[s], config.stabilize);
          predicted = forecast(model, Index(group.horizon_waves) * spw);
          if (!predicted->allFinite()) fit_failure = ErrorKind::NonFinite;
        } catch (const Error& e) {
          fit_failure = e.kind();
        }
      }
      for (int now : group.nows) {
        Outcome& outcome = outcomes[cell_of(now, s)][w];
        if (fit_failure) {
          outcome.failure = fit_failure;
          continue;
        }
        const Index steps = Index(now) * spw;
        try {
          const auto report = evaluate(predicted->leftCols(steps), window->test.values().leftCols(steps));
          outcome.values = {report.nrmse, report.pearson_r, report.aam, report.nammae};
        } catch (const Error& e) {
          outcome.failure = e.kind();
        }
      }
    }
  });

  ExperimentReport report;
  report.config = config;
  report.names = record.names();
  report.record_steps = record.steps();
  report.dt = record.dt();
  for (int niw : config.niw_set) {
    for (int now : config.now_set) {
      for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& cell_outcomes = outcomes[niw_index(niw) * per_niw + now_index(now) * per_now + s];
        CellResult cell;
        cell.key = {niw, now, specs[s].nde, specs[s].nts};
        std::array<std::vector<double>, 4> values;
        for (const auto& outcome : cell_outcomes) {
          if (outcome.failure) {
            ++cell.failed;
            ++cell.failures[std::string(to_string(*outcome.failure))];
            continue;
          }
          ++cell.evaluated;
          for (std::size_t m = 0; m < 4; ++m) values[m].push_back(outcome.values[m]);
        }
        for (std::size_t m = 0; m < 4; ++m) cell.metrics[m] = BoxSummary::from(std::move(values[m]));
        report.cells.push_back(std::move(cell));
      }
    }
  }

  if (!config.modal) return report;

  const int modal_niw = config.modal_niw ? config.modal_niw : *std::max_element(config.niw_set.begin(), config.niw_set.end());
  const int modal_now = config.modal_now ? config.modal_now : *std::max_element(config.now_set.begin(), config.now_set.end());
  std::vector<std::pair<std::string, AugmentationSpec>> selected;
  const bool has_plain = std::find(config.nde_set.begin(), config.nde_set.end(), 0) != config.nde_set.end() &&
                         std::find(config.nts_set.begin(), config.nts_set.end(), 0) != config.nts_set.end();
  if (has_plain) selected.push_back({"plain", {0, 0}});
  try {
    const auto [nde, nts] = best_setup(report, modal_niw, modal_now);
    if (!(has_plain && nde == 0 && nts == 0)) selected.push_back({"best", {nde, nts}});
  } catch (const Error&) {
  }

  const Group* modal_group = nullptr;
  for (const auto& group : groups) {
    if (group.niw == modal_niw && std::find(group.nows.begin(), group.nows.end(), modal_now) != group.nows.end()) {
      modal_group = &group;
    }
  }
  for (const auto& [label, spec] : selected) {
    std::vector<std::optional<DmdModel>> models(samples);
    parallel_for(samples, options.jobs, [&](std::size_t w) {
      try {
        const auto window = prepare(record, modal_group->windows[w]);
        const WindowFitter fitter(window, full, {spec});
        models[w] = sort_modes(fitter.fit(spec, config.stabilize, true));
        participation(*models[w]);
      } catch (const Error&) {
        models[w].reset();
      }
    });
    ModalResult result;
    result.label = label;
    result.key = {modal_niw, modal_now, spec.nde, spec.nts};
    std::vector<DmdModel> fitted;
    for (auto& model : models) {
      if (model) {
        fitted.push_back(std::move(*model));
      } else {
        ++result.failed;
      }
    }
    if (fitted.empty()) continue;
    result.statistics = aggregate(fitted);
    report.modal.push_back(std::move(result));
  }
  return report;
}

std::pair<int, int> best_setup(const ExperimentReport& report, int niw, int now) {
  std::optional<std::pair<int, int>> best;
  double best_median = 0.0;
  for (const auto& cell : report.cells) {
    if (cell.key.niw != niw || cell.key.now != now || cell.evaluated == 0) continue;
    const double median = cell.metric(Metric::Nrmse).median;
    if (std::isnan(median)) continue;
    const std::pair<int, int> candidate{cell.key.nde, cell.key.nts};
    if (!best || median < best_median || (median == best_median && candidate < *best)) {
      best = candidate;
      best_median = median;
    }
  }
  if (!best) {
    fail(ErrorKind::MissingCell, "no evaluated configuration for niw " + std::to_string(niw) + ", now " +
                                     std::to_string(now));
  }
  return *best;
}

}  // namespace admd
