#pragma once

// Quantum map of a periodically kicked system over a truncated basis of
// unperturbed levels m_min..m_max. One period is a kick, which convolves the
// amplitudes with the real Bessel kernel J_{m-n}(k), followed by free
// evolution, which multiplies a_m by exp(-i H0(m) tau).
//
// Amplitudes use the phase convention in which the kick kernel is real.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <variant>

#include "zeno/bessel.hpp"
#include "zeno/errors.hpp"
#include "zeno/random.hpp"

namespace zeno {

/// Default kernel truncation threshold.
inline constexpr double kDefaultKernelEpsilon = 1e-14;

/// Occupation allowed within one kernel bandwidth of either window edge.
inline constexpr double kBoundaryOccupationLimit = 1e-10;

inline constexpr long kMinWindowSize = 16;

struct BasisWindow {
  long m_min = 0;
  long m_max = 0;
  long m0 = 0;

  static BasisWindow make(long m_min, long m_max, long m0) {
    if (m_max < m_min || m0 < m_min || m0 > m_max) {
      throw InvalidArgument("BasisWindow: require m_min <= m0 <= m_max");
    }
    if (m_max - m_min + 1 < kMinWindowSize) {
      throw InvalidArgument("BasisWindow: window must hold at least 16 levels");
    }
    return {m_min, m_max, m0};
  }

  static BasisWindow centered(long m0, long halfwidth) { return make(m0 - halfwidth, m0 + halfwidth, m0); }

  Eigen::Index size() const noexcept { return m_max - m_min + 1; }
  bool contains(long m) const noexcept { return m >= m_min && m <= m_max; }
  Eigen::Index index_of(long m) const noexcept { return m - m_min; }
  long level_at(Eigen::Index i) const noexcept { return m_min + static_cast<long>(i); }

  friend bool operator==(const BasisWindow&, const BasisWindow&) = default;
};

template <typename Scalar>
class QuantumState {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  QuantumState(BasisWindow window, Amplitudes amplitudes, std::int64_t time_index = 0)
      : window_(window), amplitudes_(std::move(amplitudes)), time_index_(time_index) {
    if (amplitudes_.size() != window_.size()) {
      throw InvalidArgument("QuantumState: amplitude count does not match the basis window");
    }
    shrink_support();
  }

  /// All probability in level m0 of the window.
  static QuantumState delta(BasisWindow window) { return delta(window, window.m0); }

  static QuantumState delta(BasisWindow window, long m) {
    if (!window.contains(m)) throw InvalidArgument("QuantumState::delta: level outside the window");
    Amplitudes a = Amplitudes::Zero(window.size());
    a(window.index_of(m)) = Complex(1);
    return QuantumState(window, std::move(a));
  }

  const BasisWindow& window() const noexcept { return window_; }
  const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
  std::int64_t time_index() const noexcept { return time_index_; }

  Complex amplitude(long m) const { return amplitudes_(window_.index_of(m)); }
  Scalar occupation(long m) const { return std::norm(amplitude(m)); }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> occupations() const { return amplitudes_.cwiseAbs2(); }
  Scalar norm() const { return amplitudes_.squaredNorm(); }

  /// Half-open index range outside of which every amplitude is exactly zero.
  Eigen::Index support_begin() const noexcept { return support_begin_; }
  Eigen::Index support_end() const noexcept { return support_end_; }

  // Mutable access for the propagators in this header and for measurement.
  Amplitudes& mutable_amplitudes() noexcept { return amplitudes_; }
  void set_time_index(std::int64_t j) noexcept { time_index_ = j; }
  void set_support(Eigen::Index begin, Eigen::Index end) noexcept {
    support_begin_ = begin;
    support_end_ = end;
  }

  void shrink_support() {
    Eigen::Index begin = 0;
    Eigen::Index end = amplitudes_.size();
    while (begin < end && amplitudes_(begin) == Complex(0)) ++begin;
    while (end > begin && amplitudes_(end - 1) == Complex(0)) --end;
    support_begin_ = begin;
    support_end_ = end;
  }

 private:
  BasisWindow window_;
  Amplitudes amplitudes_;
  std::int64_t time_index_ = 0;
  Eigen::Index support_begin_ = 0;
  Eigen::Index support_end_ = 0;
};

/// Real kick kernel J_d(k) for |d| <= d_max, stored at offset d + d_max.
template <typename Scalar>
struct KickKernel {
  Scalar k = 0;
  Scalar epsilon = static_cast<Scalar>(kDefaultKernelEpsilon);
  Eigen::Index d_max = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;

  Scalar operator()(Eigen::Index d) const {
    return (d < -d_max || d > d_max) ? Scalar(0) : coefficients(d + d_max);
  }
  Eigen::Index width() const noexcept { return 2 * d_max + 1; }
};

/// Bessel kernel truncated at the smallest d_max with |J_d(k)| < epsilon for
/// every |d| > d_max.
template <typename Scalar = double>
KickKernel<Scalar> build_kernel(Scalar k, Scalar epsilon = static_cast<Scalar>(kDefaultKernelEpsilon)) {
  if (!(k >= Scalar(0)) || !std::isfinite(static_cast<double>(k))) {
    throw InvalidArgument("build_kernel: kick strength must be finite and non-negative");
  }
  if (!(epsilon > Scalar(0)) || epsilon > Scalar(1e-10)) {
    throw InvalidArgument("build_kernel: epsilon must lie in (0, 1e-10]");
  }

  KickKernel<Scalar> kernel;
  kernel.k = k;
  kernel.epsilon = epsilon;

  // Beyond the turning point |J_n| decreases monotonically, so the last
  // order at or above epsilon fixes the bandwidth.
  Eigen::Index n_max = static_cast<Eigen::Index>(std::ceil(k)) + 32;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> j;
  Eigen::Index d_max = 0;
  for (;;) {
    j = bessel_j_sequence(k, n_max);
    d_max = 0;
    for (Eigen::Index n = n_max; n >= 0; --n) {
      if (std::abs(j(n)) >= epsilon) {
        d_max = n;
        break;
      }
    }
    if (d_max < n_max - 4) break;
    n_max *= 2;
  }

  kernel.d_max = d_max;
  kernel.coefficients.resize(2 * d_max + 1);
  for (Eigen::Index d = 0; d <= d_max; ++d) {
    kernel.coefficients(d_max + d) = j(d);
    kernel.coefficients(d_max - d) = (d % 2 == 0) ? j(d) : -j(d);
  }
  return kernel;
}

/// Transpose of the kick operator. The kernel is real and orthogonal, so this
/// is also its inverse.
template <typename Scalar>
KickKernel<Scalar> adjoint(const KickKernel<Scalar>& kernel) {
  KickKernel<Scalar> out = kernel;
  out.coefficients = kernel.coefficients.reverse();
  return out;
}

struct Rotator {};
struct Linear {
  double omega = 0;
};
struct RandomLevels {
  std::uint64_t seed = 0;
};
using SpectrumVariant = std::variant<Rotator, Linear, RandomLevels>;

/// Per-level free-evolution phases H0(m) tau reduced to [0, 2π), fixed for
/// the lifetime of a run.
template <typename Scalar>
class SpectrumModel {
 public:
  using Complex = std::complex<Scalar>;

  SpectrumModel(SpectrumVariant variant, Scalar tau, BasisWindow window)
      : variant_(variant), tau_(tau), window_(window) {
    if (!(tau > Scalar(0))) throw InvalidArgument("SpectrumModel: tau must be positive");
    phase_table_.resize(window.size());
    factors_.resize(window.size());
    for (Eigen::Index i = 0; i < window.size(); ++i) {
      phase_table_(i) = level_phase(variant_, tau_, window.level_at(i));
      factors_(i) = std::polar(Scalar(1), -phase_table_(i));
    }
  }

  /// Phase of level m in [0, 2π); independent of the window for every variant.
  static Scalar level_phase(const SpectrumVariant& variant, Scalar tau, long m) {
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar raw = 0;
    if (std::holds_alternative<Rotator>(variant)) {
      const auto m2 = static_cast<long long>(m) * static_cast<long long>(m);
      raw = static_cast<Scalar>(m2) / Scalar(2) * tau;
    } else if (const auto* lin = std::get_if<Linear>(&variant)) {
      raw = static_cast<Scalar>(lin->omega) * static_cast<Scalar>(m) * tau;
    } else {
      const auto& rnd = std::get<RandomLevels>(variant);
      const double g = unit_uniform(mix64(substream_seed(rnd.seed, static_cast<std::uint64_t>(m))));
      return two_pi * static_cast<Scalar>(g);
    }
    Scalar reduced = std::fmod(raw, two_pi);
    if (reduced < Scalar(0)) reduced += two_pi;
    return reduced;
  }

  const SpectrumVariant& variant() const noexcept { return variant_; }
  Scalar tau() const noexcept { return tau_; }
  const BasisWindow& window() const noexcept { return window_; }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& phase_table() const noexcept { return phase_table_; }
  /// exp(-i phase) per basis index.
  const Eigen::Matrix<Complex, Eigen::Dynamic, 1>& factors() const noexcept { return factors_; }
  Scalar phase(long m) const { return phase_table_(window_.index_of(m)); }

 private:
  SpectrumVariant variant_;
  Scalar tau_;
  BasisWindow window_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> phase_table_;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> factors_;
};

namespace detail {

template <typename Scalar>
Scalar band_occupation(const QuantumState<Scalar>& state, Eigen::Index begin, Eigen::Index end) {
  begin = std::max(begin, state.support_begin());
  end = std::min(end, state.support_end());
  return end > begin ? state.amplitudes().segment(begin, end - begin).squaredNorm() : Scalar(0);
}

}  // namespace detail

/// Applies the kick in place: a'_m = sum_n J_{m-n}(k) a_n. Throws
/// TruncationOverflow if more than kBoundaryOccupationLimit of probability
/// sits within one kernel bandwidth of a window edge.
template <typename Scalar>
void kick_in_place(QuantumState<Scalar>& state, const KickKernel<Scalar>& kernel,
                   typename QuantumState<Scalar>::Amplitudes& workspace) {
  const Eigen::Index size = state.window().size();
  const Eigen::Index band = kernel.d_max;
  const Eigen::Index lo = state.support_begin();
  const Eigen::Index hi = state.support_end();
  if (hi <= lo) return;

  if (lo < band) {
    const Scalar occ = detail::band_occupation(state, 0, band);
    if (occ > Scalar(kBoundaryOccupationLimit)) {
      throw TruncationOverflow(Edge::Lower, state.window().m_min, static_cast<double>(occ));
    }
  }
  if (hi > size - band) {
    const Scalar occ = detail::band_occupation(state, size - band, size);
    if (occ > Scalar(kBoundaryOccupationLimit)) {
      throw TruncationOverflow(Edge::Upper, state.window().m_max, static_cast<double>(occ));
    }
  }

  const Eigen::Index out_lo = std::max<Eigen::Index>(0, lo - band);
  const Eigen::Index out_hi = std::min<Eigen::Index>(size, hi + band);
  auto& a = state.mutable_amplitudes();
  workspace.resize(size);
  workspace.segment(out_lo, out_hi - out_lo).setZero();

  for (Eigen::Index d = -band; d <= band; ++d) {
    const Scalar j = kernel.coefficients(d + band);
    // out[n + d] += J_d a[n] for source n in [lo, hi) with n + d in the window.
    const Eigen::Index src_lo = std::max(lo, -d);
    const Eigen::Index src_hi = std::min(hi, size - d);
    if (src_hi <= src_lo) continue;
    workspace.segment(src_lo + d, src_hi - src_lo) += j * a.segment(src_lo, src_hi - src_lo);
  }

  a.segment(out_lo, out_hi - out_lo) = workspace.segment(out_lo, out_hi - out_lo);
  state.set_support(out_lo, out_hi);
}

template <typename Scalar>
void free_in_place(QuantumState<Scalar>& state, const SpectrumModel<Scalar>& spectrum) {
  if (spectrum.window() != state.window()) {
    throw InvalidArgument("apply_free: spectrum phase table does not cover the state's window");
  }
  const Eigen::Index lo = state.support_begin();
  const Eigen::Index len = state.support_end() - lo;
  if (len <= 0) return;
  state.mutable_amplitudes().segment(lo, len).array() *= spectrum.factors().segment(lo, len).array();
}

template <typename Scalar>
void free_adjoint_in_place(QuantumState<Scalar>& state, const SpectrumModel<Scalar>& spectrum) {
  if (spectrum.window() != state.window()) {
    throw InvalidArgument("apply_free: spectrum phase table does not cover the state's window");
  }
  const Eigen::Index lo = state.support_begin();
  const Eigen::Index len = state.support_end() - lo;
  if (len <= 0) return;
  state.mutable_amplitudes().segment(lo, len).array() *= spectrum.factors().segment(lo, len).array().conjugate();
}

/// Propagates one full period in place (kick, then free evolution) and
/// advances the time index.
template <typename Scalar>
void step_in_place(QuantumState<Scalar>& state, const KickKernel<Scalar>& kernel,
                   const SpectrumModel<Scalar>& spectrum, typename QuantumState<Scalar>::Amplitudes& workspace) {
  kick_in_place(state, kernel, workspace);
  free_in_place(state, spectrum);
  state.set_time_index(state.time_index() + 1);
}

/// Inverse of step_in_place: undoes the free evolution, then the kick.
template <typename Scalar>
void step_adjoint_in_place(QuantumState<Scalar>& state, const KickKernel<Scalar>& kernel,
                           const SpectrumModel<Scalar>& spectrum,
                           typename QuantumState<Scalar>::Amplitudes& workspace) {
  free_adjoint_in_place(state, spectrum);
  kick_in_place(state, adjoint(kernel), workspace);
  state.set_time_index(state.time_index() - 1);
}

template <typename Scalar>
QuantumState<Scalar> apply_kick(QuantumState<Scalar> state, const KickKernel<Scalar>& kernel) {
  typename QuantumState<Scalar>::Amplitudes workspace;
  kick_in_place(state, kernel, workspace);
  return state;
}

template <typename Scalar>
QuantumState<Scalar> apply_free(QuantumState<Scalar> state, const SpectrumModel<Scalar>& spectrum) {
  free_in_place(state, spectrum);
  return state;
}

template <typename Scalar>
QuantumState<Scalar> step(QuantumState<Scalar> state, const KickKernel<Scalar>& kernel,
                          const SpectrumModel<Scalar>& spectrum) {
  typename QuantumState<Scalar>::Amplitudes workspace;
  step_in_place(state, kernel, spectrum, workspace);
  return state;
}

template <typename Scalar>
QuantumState<Scalar> step_adjoint(QuantumState<Scalar> state, const KickKernel<Scalar>& kernel,
                                  const SpectrumModel<Scalar>& spectrum) {
  typename QuantumState<Scalar>::Amplitudes workspace;
  step_adjoint_in_place(state, kernel, spectrum, workspace);
  return state;
}

}  // namespace zeno
