#pragma once

#include <vector>

#include <Eigen/Core>

#include "admd/dmd.hpp"

namespace admd {

enum class ParticipationKind {
  /// pi_k proportional to |b_k| ||phi_k||
  Amplitude,
  /// pi_k proportional to sum_j |b_k exp(omega_k t_j)|^2 ||phi_k||^2 over the
  /// first `steps` samples
  TimeIntegratedEnergy,
};

/// Normalized modal participation; excluded modes get zero. Throws
/// DegenerateAmplitudes when every amplitude vanishes.
Eigen::VectorXd participation(const DmdModel& model, ParticipationKind kind = ParticipationKind::Amplitude,
                              Index steps = 1);

/// Ascending Im(omega), then ascending Re(omega), then descending
/// participation.
std::vector<Index> mode_order(const DmdModel& model);
DmdModel permute_modes(const DmdModel& model, const std::vector<Index>& order);
DmdModel sort_modes(const DmdModel& model);

/// Linear-interpolation quantile (h = (N - 1) p).
double quantile(std::vector<double> values, double probability);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};
Quartiles quartiles(std::vector<double> values);

struct SlotStatistics {
  Quartiles re_omega;
  Quartiles im_omega;
  Quartiles participation;
};

/// Quartiles of |phi_slot[i]| for every entry i of one mode slot.
struct ComponentBands {
  Index slot = 0;
  std::vector<Quartiles> magnitude;
};

struct ModeStatistics {
  Index dim = 0;
  Index realizations = 0;
  std::vector<SlotStatistics> slots;
  /// Slots with the highest median participation, most participated first.
  std::vector<Index> top_slots;
  std::vector<ComponentBands> component_bands;
};

/// Slot-wise statistics over realizations that were already passed through
/// `sort_modes`. All realizations must carry the same number of modes.
ModeStatistics aggregate(const std::vector<DmdModel>& realizations,
                         ParticipationKind kind = ParticipationKind::Amplitude, Index steps = 1);

}  // namespace admd
