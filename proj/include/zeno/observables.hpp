#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "zeno/errors.hpp"
#include "zeno/kick_engine.hpp"

namespace zeno {

struct DispersionEntry {
  std::int64_t j = 0;
  double dispersion = 0;
  double norm = 1;
  double p_m0 = 1;
};

/// Per-kick record of the momentum dispersion about m0.
class DispersionSeries {
 public:
  DispersionSeries() = default;
  explicit DispersionSeries(std::vector<DispersionEntry> entries);

  /// Appends an entry; j must exceed the last recorded index.
  void push_back(const DispersionEntry& entry);

  const std::vector<DispersionEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const DispersionEntry& operator[](std::size_t i) const { return entries_[i]; }
  const DispersionEntry& front() const { return entries_.front(); }
  const DispersionEntry& back() const { return entries_.back(); }

  /// Entry with kick index j.
  const DispersionEntry& at_kick(std::int64_t j) const;

  Eigen::VectorXd kicks() const;
  Eigen::VectorXd dispersions() const;

 private:
  std::vector<DispersionEntry> entries_;
};

/// <(m - m0)^2> = sum (m - m0)^2 |a_m|^2 with m0 taken from the window.
template <typename Scalar>
Scalar dispersion(const QuantumState<Scalar>& state) {
  const BasisWindow& w = state.window();
  const Eigen::Index lo = state.support_begin();
  const Eigen::Index hi = state.support_end();
  Scalar sum = 0;
  for (Eigen::Index i = lo; i < hi; ++i) {
    const auto offset = static_cast<Scalar>(w.level_at(i) - w.m0);
    sum += offset * offset * std::norm(state.amplitudes()(i));
  }
  return sum;
}

template <typename Scalar>
DispersionEntry record(const QuantumState<Scalar>& state) {
  return {state.time_index(), static_cast<double>(dispersion(state)), static_cast<double>(state.norm()),
          static_cast<double>(state.occupation(state.window().m0))};
}

/// Occupation per basis level.
struct OccupationProfile {
  BasisWindow window;
  Eigen::VectorXd values;
};

/// Running mean of occupation vectors.
class ProfileAccumulator {
 public:
  explicit ProfileAccumulator(BasisWindow window) : window_(window), sum_(Eigen::VectorXd::Zero(window.size())) {}

  template <typename Scalar>
  void add(const QuantumState<Scalar>& state) {
    if (state.window() != window_) throw InvalidArgument("ProfileAccumulator: window mismatch");
    sum_ += state.amplitudes().cwiseAbs2().template cast<double>();
    ++count_;
  }

  std::int64_t count() const noexcept { return count_; }

  OccupationProfile mean() const {
    if (count_ == 0) throw InvalidArgument("time_averaged_profile: empty averaging window");
    return {window_, sum_ / static_cast<double>(count_)};
  }

 private:
  BasisWindow window_;
  Eigen::VectorXd sum_;
  std::int64_t count_ = 0;
};

template <typename Scalar>
OccupationProfile time_averaged_profile(std::span<const QuantumState<Scalar>> states) {
  if (states.empty()) throw InvalidArgument("time_averaged_profile: empty averaging window");
  ProfileAccumulator acc(states.front().window());
  for (const auto& s : states) acc.add(s);
  return acc.mean();
}

/// Bins with time-averaged occupation at or below this are left out of fits.
inline constexpr double kUsableOccupation = 1e-12;

struct LocalizationFit {
  double lambda = 0;
  /// Root-mean-square residual of ln(occupation) about the fitted line.
  double residual = 0;
  long m_lo = 0;
  long m_hi = 0;
  std::int64_t bins = 0;
};

/// Fits ln p_m = c - 2|m - m0| / lambda over usable bins on both sides of m0.
/// Needs at least `min_bins_per_side` usable bins on each side; throws
/// NoLocalization if the fitted slope is not negative.
LocalizationFit fit_localization_length(const OccupationProfile& profile, int min_bins_per_side = 20);

/// Ordinary least-squares slope of y against x.
double least_squares_slope(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Least-squares slope of dispersion against j over j_lo <= j <= j_hi, in
/// states^2 per kick.
double diffusion_slope(const DispersionSeries& series, std::int64_t j_lo, std::int64_t j_hi);

struct BreakTime {
  std::int64_t j = 0;
  /// No slowdown was found; `j` is the last recorded kick.
  bool delocalized = false;
};

/// Window length used by detect_break_time: k^2/4 kicks, at least 2.
std::int64_t break_time_window(double k);

/// First kick whose trailing-window diffusion slope falls below a quarter of
/// the slope over the initial window.
BreakTime detect_break_time(const DispersionSeries& series, double k);

/// Trailing moving average of the dispersion over `width` kicks (shorter at
/// the start of the series).
Eigen::VectorXd smoothed_dispersion(const DispersionSeries& series, std::int64_t width);

}  // namespace zeno
