#include "zeno/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zeno {

DispersionSeries::DispersionSeries(std::vector<DispersionEntry> entries) {
  entries_.reserve(entries.size());
  for (const auto& e : entries) push_back(e);
}

void DispersionSeries::push_back(const DispersionEntry& entry) {
  if (!entries_.empty() && entry.j <= entries_.back().j) {
    throw InvalidArgument("DispersionSeries: kick indices must be strictly increasing");
  }
  if (!(entry.dispersion >= 0)) throw InvalidArgument("DispersionSeries: dispersion must be non-negative");
  entries_.push_back(entry);
}

const DispersionEntry& DispersionSeries::at_kick(std::int64_t j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                             [](const DispersionEntry& e, std::int64_t value) { return e.j < value; });
  if (it == entries_.end() || it->j != j) {
    throw InvalidArgument("DispersionSeries: no entry for kick " + std::to_string(j));
  }
  return *it;
}

Eigen::VectorXd DispersionSeries::kicks() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(entries_[i].j);
  return out;
}

Eigen::VectorXd DispersionSeries::dispersions() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) out(static_cast<Eigen::Index>(i)) = entries_[i].dispersion;
  return out;
}

double least_squares_slope(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("least_squares_slope: need at least two paired samples");
  }
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const double sxx = dx.square().sum();
  if (!(sxx > 0)) throw InvalidArgument("least_squares_slope: abscissae are all equal");
  return (dx * (y.array() - y.mean())).sum() / sxx;
}

LocalizationFit fit_localization_length(const OccupationProfile& profile, int min_bins_per_side) {
  const BasisWindow& w = profile.window;
  if (profile.values.size() != w.size()) throw InvalidArgument("fit_localization_length: profile size mismatch");

  std::vector<double> xs;
  std::vector<double> ys;
  int left = 0;
  int right = 0;
  long m_lo = w.m_max;
  long m_hi = w.m_min;
  for (Eigen::Index i = 0; i < profile.values.size(); ++i) {
    const double p = profile.values(i);
    if (!(p > kUsableOccupation)) continue;
    const long m = w.level_at(i);
    if (m < w.m0) ++left;
    if (m > w.m0) ++right;
    m_lo = std::min(m_lo, m);
    m_hi = std::max(m_hi, m);
    xs.push_back(static_cast<double>(std::labs(m - w.m0)));
    ys.push_back(std::log(p));
  }
  if (left < min_bins_per_side || right < min_bins_per_side) {
    throw InvalidArgument("fit_localization_length: need at least " + std::to_string(min_bins_per_side) +
                          " usable bins on each side of m0 (have " + std::to_string(left) + " and " +
                          std::to_string(right) + ")");
  }

  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const double slope = least_squares_slope(x, y);
  // A decay below rounding level across the fitted range counts as flat.
  if (!(slope * (x.maxCoeff() - x.minCoeff()) < -1e-9)) {
    throw NoLocalization("fit_localization_length: occupation does not decay away from m0 (slope " +
                         std::to_string(slope) + ")");
  }
  const double intercept = y.mean() - slope * x.mean();
  const double rms = std::sqrt((y.array() - intercept - slope * x.array()).square().mean());

  LocalizationFit fit;
  fit.lambda = -2.0 / slope;
  fit.residual = rms;
  fit.m_lo = m_lo;
  fit.m_hi = m_hi;
  fit.bins = static_cast<std::int64_t>(xs.size());
  return fit;
}

double diffusion_slope(const DispersionSeries& series, std::int64_t j_lo, std::int64_t j_hi) {
  if (series.empty() || j_hi <= j_lo || j_lo < series.front().j || j_hi > series.back().j) {
    throw InvalidArgument("diffusion_slope: need j_lo < j_hi inside the recorded range");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& e : series.entries()) {
    if (e.j < j_lo || e.j > j_hi) continue;
    xs.push_back(static_cast<double>(e.j));
    ys.push_back(e.dispersion);
  }
  if (xs.size() < 2) throw InvalidArgument("diffusion_slope: fewer than two entries in range");
  return least_squares_slope(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                             Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

std::int64_t break_time_window(double k) {
  return std::max<std::int64_t>(2, std::llround(k * k / 4.0));
}

BreakTime detect_break_time(const DispersionSeries& series, double k) {
  const std::int64_t window = break_time_window(k);
  const auto needed = static_cast<std::int64_t>(std::ceil(2.0 * k * k));
  if (series.empty() || series.back().j - series.front().j < needed) {
    throw InvalidArgument("detect_break_time: series must cover at least 2 k^2 kicks");
  }

  const Eigen::VectorXd j = series.kicks();
  const Eigen::VectorXd d = series.dispersions();
  const Eigen::Index n = j.size();
  const Eigen::Index w = std::min<Eigen::Index>(window, n - 1);

  const double initial = least_squares_slope(j.head(w + 1), d.head(w + 1));
  if (initial > 0) {
    for (Eigen::Index end = w + 1; end < n; ++end) {
      const Eigen::Index begin = end - w;
      const double trailing = least_squares_slope(j.segment(begin, w + 1), d.segment(begin, w + 1));
      if (trailing < 0.25 * initial) return {series[static_cast<std::size_t>(end)].j, false};
    }
  }
  return {series.back().j, true};
}

Eigen::VectorXd smoothed_dispersion(const DispersionSeries& series, std::int64_t width) {
  if (width < 1) throw InvalidArgument("smoothed_dispersion: width must be at least 1");
  const Eigen::VectorXd d = series.dispersions();
  Eigen::VectorXd out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Eigen::Index begin = std::max<Eigen::Index>(0, i + 1 - width);
    out(i) = d.segment(begin, i + 1 - begin).mean();
  }
  return out;
}

}  // namespace zeno
