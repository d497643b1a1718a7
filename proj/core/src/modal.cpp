#include "admd/modal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "admd/error.hpp"

namespace admd {

Eigen::VectorXd participation(const DmdModel& model, ParticipationKind kind, Index steps) {
  const Index p = model.modes_count();
  if (model.amplitudes.size() != p) fail(ErrorKind::InvalidInput, "model has no amplitudes");
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(p);
  for (Index k = 0; k < p; ++k) {
    if (model.excluded[std::size_t(k)]) continue;
    const double amplitude = std::abs(model.amplitudes(k)) * model.modes.col(k).norm();
    if (kind == ParticipationKind::Amplitude) {
      weight(k) = amplitude;
    } else {
      const double decay = 2.0 * model.omegas(k).real() * model.dt;
      double energy = 0.0;
      for (Index j = 0; j < std::max<Index>(steps, 1); ++j) energy += std::exp(decay * double(j));
      weight(k) = amplitude * amplitude * energy;
    }
  }
  const double total = weight.sum();
  if (!(total > 0.0) || !std::isfinite(total)) fail(ErrorKind::DegenerateAmplitudes, "all modal amplitudes vanish");
  return weight / total;
}

std::vector<Index> mode_order(const DmdModel& model) {
  const Index p = model.modes_count();
  Eigen::VectorXd share = Eigen::VectorXd::Zero(p);
  if (model.amplitudes.size() == p) {
    try {
      share = participation(model);
    } catch (const Error&) {
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Complex wa = model.omegas(a);
    const Complex wb = model.omegas(b);
    if (wa.imag() != wb.imag()) return wa.imag() < wb.imag();
    if (wa.real() != wb.real()) return wa.real() < wb.real();
    return share(a) > share(b);
  });
  return order;
}

DmdModel permute_modes(const DmdModel& model, const std::vector<Index>& order) {
  const Index p = model.modes_count();
  if (Index(order.size()) != p) fail(ErrorKind::DimensionMismatch, "permutation size differs from mode count");
  DmdModel out = model;
  const bool has_amplitudes = model.amplitudes.size() == p;
  for (Index k = 0; k < p; ++k) {
    const Index src = order[std::size_t(k)];
    out.eigenvalues(k) = model.eigenvalues(src);
    out.omegas(k) = model.omegas(src);
    out.modes.col(k) = model.modes.col(src);
    if (has_amplitudes) out.amplitudes(k) = model.amplitudes(src);
    out.excluded[std::size_t(k)] = model.excluded[std::size_t(src)];
    out.stabilized[std::size_t(k)] = model.stabilized[std::size_t(src)];
  }
  return out;
}

DmdModel sort_modes(const DmdModel& model) { return permute_modes(model, mode_order(model)); }

double quantile(std::vector<double> values, double probability) {
  if (values.empty()) fail(ErrorKind::InvalidInput, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = double(values.size() - 1) * std::clamp(probability, 0.0, 1.0);
  const auto lo = std::size_t(std::floor(h));
  const double frac = h - double(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  const double a = values[lo];
  const double b = values[lo + 1];
  if (a == b) return a;
  // Excluded modes carry Re(omega) = -inf; keep the infinity instead of
  // producing inf - inf.
  if (!std::isfinite(a) || !std::isfinite(b)) return (1.0 - frac) * a + frac * b;
  return a + frac * (b - a);
}

Quartiles quartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75)};
}

ModeStatistics aggregate(const std::vector<DmdModel>& realizations, ParticipationKind kind, Index steps) {
  if (realizations.empty()) fail(ErrorKind::InvalidInput, "no realizations to aggregate");
  const Index p = realizations.front().modes_count();
  for (const auto& model : realizations) {
    if (model.modes_count() != p || model.modes.rows() != realizations.front().modes.rows()) {
      fail(ErrorKind::DimensionMismatch, "realizations carry " + std::to_string(model.modes_count()) + " and " +
                                             std::to_string(p) + " modes");
    }
  }
  const std::size_t count = realizations.size();
  std::vector<Eigen::VectorXd> shares;
  shares.reserve(count);
  for (const auto& model : realizations) shares.push_back(participation(model, kind, steps));

  ModeStatistics stats;
  stats.dim = p;
  stats.realizations = Index(count);
  std::vector<double> re(count), im(count), pi(count);
  for (Index k = 0; k < p; ++k) {
    for (std::size_t r = 0; r < count; ++r) {
      re[r] = realizations[r].omegas(k).real();
      im[r] = realizations[r].omegas(k).imag();
      pi[r] = shares[r](k);
    }
    stats.slots.push_back({quartiles(re), quartiles(im), quartiles(pi)});
  }

  std::vector<Index> ranked(static_cast<std::size_t>(p));
  std::iota(ranked.begin(), ranked.end(), Index(0));
  std::stable_sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
    return stats.slots[std::size_t(a)].participation.median > stats.slots[std::size_t(b)].participation.median;
  });
  stats.top_slots.assign(ranked.begin(), ranked.begin() + std::min<Index>(2, p));

  const Index rows = realizations.front().modes.rows();
  std::vector<double> magnitude(count);
  for (Index slot : stats.top_slots) {
    ComponentBands bands;
    bands.slot = slot;
    for (Index i = 0; i < rows; ++i) {
      for (std::size_t r = 0; r < count; ++r) magnitude[r] = std::abs(realizations[r].modes(i, slot));
      bands.magnitude.push_back(quartiles(magnitude));
    }
    stats.component_bands.push_back(std::move(bands));
  }
  return stats;
}

}  // namespace admd
