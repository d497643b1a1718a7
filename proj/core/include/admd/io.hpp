#pragma once

#include <iosfwd>
#include <string>

#include "admd/dmd.hpp"
#include "admd/experiment.hpp"
#include "admd/modal.hpp"
#include "admd/text.hpp"

namespace admd {

// Models are JSON documents whose keys follow the DmdModel fields. Complex
// vectors are {"re": [...], "im": [...]}; non-finite reals are the strings
// "inf", "-inf" and "nan".
void write_model(std::ostream& out, const DmdModel& model);
DmdModel read_model(std::istream& in);
void save_model(const std::string& path, const DmdModel& model);
DmdModel load_model(const std::string& path);

/// Structured report document (config echo, per-cell summaries, best
/// setups, modal statistics).
void write_report(std::ostream& out, const ExperimentReport& report);

/// One row per configuration x metric x statistic.
Table summary_table(const ExperimentReport& report);
/// Evaluated and failed window counts per configuration.
Table accounting_table(const ExperimentReport& report);
/// Best (nde, nts) per (niw, now) cell.
Table best_setup_table(const ExperimentReport& report);
/// Box-plot outliers, one row per value.
Table outlier_table(const ExperimentReport& report);

/// Sorted mode listing for one model.
Table mode_table(const DmdModel& model);
/// Slot-wise quartiles of Re(omega), Im(omega) and participation.
Table mode_statistics_table(const ModeStatistics& stats);
/// Eigenvector component magnitude bands for the top slots. `layout` and
/// `names` label each entry by block and variable when provided.
Table component_bands_table(const ModeStatistics& stats, const BlockLayout& layout = {},
                            const std::vector<std::string>& names = {});

/// Flat `key = value` text; lists are comma separated integers and `#`
/// starts a comment. Unknown keys and malformed values throw ParseError
/// naming the line and field.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& config);

}  // namespace admd
