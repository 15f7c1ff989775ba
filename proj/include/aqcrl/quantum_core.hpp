#pragma once

// State vectors, structured Hamiltonians and time evolution for the
// interpolated Hamiltonian H(s) = (1 - s) H_B + s H_P.
//
// Conventions: hbar = 1, qubit q is bit q of the computational-basis index,
// global phases are never compared.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aqcrl/errors.hpp"

namespace aqcrl {

using Complex = std::complex<double>;
using Amplitudes = std::vector<Complex>;

inline constexpr int kMaxQubits = 20;
inline constexpr std::size_t kMaxDenseDimension = 4096;
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kDriftTarget = 1e-9;
inline constexpr double kDriftFailure = 1e-6;

inline std::size_t dimension_for(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ParameterError("qubit count must lie in [1, " + std::to_string(kMaxQubits) +
                         "], got " + std::to_string(n_qubits));
  return std::size_t{1} << n_qubits;
}

inline double squared_norm(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc;
}

inline double norm(std::span<const Complex> v) { return std::sqrt(squared_norm(v)); }

// <a|b>
inline Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw StructuralError("inner product of vectors with different lengths");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

// Normalized amplitudes over the 2^n computational basis states. Immutable.
class StateVector {
 public:
  StateVector(int n_qubits, Amplitudes amplitudes, double norm_tolerance = kNormTolerance)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != dimension_for(n_qubits_))
      throw StructuralError("state vector length " + std::to_string(amplitudes_.size()) +
                            " does not equal 2^" + std::to_string(n_qubits_));
    const double drift = std::abs(aqcrl::norm(amplitudes_) - 1.0);
    if (!(drift <= norm_tolerance))
      throw ParameterError("state vector is not normalized (|norm - 1| = " +
                           std::to_string(drift) + ")");
  }

  static StateVector basis_state(int n_qubits, std::uint64_t index) {
    Amplitudes a(dimension_for(n_qubits));
    if (index >= a.size()) throw ParameterError("basis index out of range");
    a[index] = 1.0;
    return {n_qubits, std::move(a)};
  }

  // |psi_0>: every qubit in the +1 eigenstate of Pauli X.
  static StateVector uniform_superposition(int n_qubits) {
    const auto dim = dimension_for(n_qubits);
    return {n_qubits, Amplitudes(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0))};
  }

  static StateVector normalized(int n_qubits, Amplitudes amplitudes) {
    const double nrm = aqcrl::norm(amplitudes);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ParameterError("cannot normalize a zero or non-finite vector");
    for (auto& z : amplitudes) z /= nrm;
    return {n_qubits, std::move(amplitudes)};
  }

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  double norm() const { return aqcrl::norm(amplitudes_); }
  double probability(std::uint64_t index) const { return std::norm(amplitudes_.at(index)); }

 private:
  int n_qubits_;
  Amplitudes amplitudes_;
};

// One of the three structured operators used for H_B and H_P.
class HamiltonianTerm {
 public:
  // 1 - |v><v| for a unit vector v.
  struct RankOneProjectorComplement {
    Amplitudes vector;
  };
  // sum_q (1 - X_q) / 2
  struct TransverseFieldSum {};
  // diag(entries)
  struct Diagonal {
    std::vector<double> entries;
  };
  using Payload = std::variant<RankOneProjectorComplement, TransverseFieldSum, Diagonal>;

  static HamiltonianTerm projector_complement(int n_qubits, Amplitudes v) {
    if (v.size() != dimension_for(n_qubits)) throw StructuralError("projector vector has wrong length");
    if (std::abs(aqcrl::norm(v) - 1.0) > kNormTolerance)
      throw ParameterError("projector vector must have unit norm");
    return HamiltonianTerm(n_qubits, RankOneProjectorComplement{std::move(v)});
  }

  static HamiltonianTerm projector_complement(const StateVector& v) {
    return projector_complement(v.n_qubits(), Amplitudes(v.amplitudes().begin(), v.amplitudes().end()));
  }

  static HamiltonianTerm transverse_field(int n_qubits) {
    dimension_for(n_qubits);
    return HamiltonianTerm(n_qubits, TransverseFieldSum{});
  }

  static HamiltonianTerm diagonal(int n_qubits, std::vector<double> entries) {
    if (entries.size() != dimension_for(n_qubits)) throw StructuralError("diagonal has wrong length");
    for (double d : entries)
      if (!std::isfinite(d)) throw ParameterError("diagonal entries must be finite");
    return HamiltonianTerm(n_qubits, Diagonal{std::move(entries)});
  }

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << n_qubits_; }
  const Payload& payload() const noexcept { return payload_; }

  // Smallest interval known to contain the spectrum.
  std::pair<double, double> spectral_bounds() const {
    return std::visit(
        [&](const auto& p) -> std::pair<double, double> {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RankOneProjectorComplement>) {
            return {0.0, 1.0};
          } else if constexpr (std::is_same_v<T, TransverseFieldSum>) {
            return {0.0, static_cast<double>(n_qubits_)};
          } else {
            auto [lo, hi] = std::minmax_element(p.entries.begin(), p.entries.end());
            return {*lo, *hi};
          }
        },
        payload_);
  }

  // out = scale * H * in            (accumulate == false)
  // out = out + scale * H * in      (accumulate == true)
  void apply(double scale, std::span<const Complex> in, std::span<Complex> out, bool accumulate) const {
    const std::size_t dim = dimension();
    if (in.size() != dim || out.size() != dim)
      throw StructuralError("Hamiltonian of dimension " + std::to_string(dim) +
                            " applied to vector of length " + std::to_string(in.size()));
    if (!accumulate) std::fill(out.begin(), out.end(), Complex{});
    // std::complex arrays are layout compatible with interleaved doubles.
    const double* x = reinterpret_cast<const double*>(in.data());
    double* y = reinterpret_cast<double*>(out.data());
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RankOneProjectorComplement>) {
            const double* v = reinterpret_cast<const double*>(p.vector.data());
            double ore = 0.0, oim = 0.0;  // <v|in>
            for (std::size_t i = 0; i < dim; ++i) {
              const double vr = v[2 * i], vi = v[2 * i + 1];
              const double xr = x[2 * i], xi = x[2 * i + 1];
              ore += vr * xr + vi * xi;
              oim += vr * xi - vi * xr;
            }
            ore *= scale;
            oim *= scale;
            for (std::size_t i = 0; i < dim; ++i) {
              const double vr = v[2 * i], vi = v[2 * i + 1];
              y[2 * i] += scale * x[2 * i] - (vr * ore - vi * oim);
              y[2 * i + 1] += scale * x[2 * i + 1] - (vr * oim + vi * ore);
            }
          } else if constexpr (std::is_same_v<T, TransverseFieldSum>) {
            const double diag = 0.5 * scale * n_qubits_;
            for (std::size_t i = 0; i < 2 * dim; ++i) y[i] += diag * x[i];
            const double c = -0.5 * scale;
            for (int q = 0; q < n_qubits_; ++q) {
              const std::size_t width = std::size_t{2} << q;  // doubles per half block
              for (std::size_t base = 0; base < 2 * dim; base += 2 * width) {
                double* lo = y + base;
                double* hi = y + base + width;
                const double* xlo = x + base;
                const double* xhi = x + base + width;
                for (std::size_t k = 0; k < width; ++k) {
                  lo[k] += c * xhi[k];
                  hi[k] += c * xlo[k];
                }
              }
            }
          } else {
            const double* d = p.entries.data();
            for (std::size_t i = 0; i < dim; ++i) {
              const double f = scale * d[i];
              y[2 * i] += f * x[2 * i];
              y[2 * i + 1] += f * x[2 * i + 1];
            }
          }
        },
        payload_);
  }

 private:
  HamiltonianTerm(int n_qubits, Payload payload) : n_qubits_(n_qubits), payload_(std::move(payload)) {}

  int n_qubits_;
  Payload payload_;
};

// Driver H_B and problem H_P on a common register.
class HamiltonianPair {
 public:
  HamiltonianPair(HamiltonianTerm h_b, HamiltonianTerm h_p) : h_b_(std::move(h_b)), h_p_(std::move(h_p)) {
    if (h_b_.n_qubits() != h_p_.n_qubits())
      throw StructuralError("H_B and H_P act on different qubit counts");
  }

  const HamiltonianTerm& h_b() const noexcept { return h_b_; }
  const HamiltonianTerm& h_p() const noexcept { return h_p_; }
  int n_qubits() const noexcept { return h_b_.n_qubits(); }
  std::size_t dimension() const noexcept { return h_b_.dimension(); }

  // Interval containing the spectrum of H(s), valid for any real s.
  std::pair<double, double> spectral_bounds(double s) const {
    auto [blo, bhi] = h_b_.spectral_bounds();
    auto [plo, phi] = h_p_.spectral_bounds();
    const double wb = 1.0 - s, wp = s;
    const double lo = std::min(wb * blo, wb * bhi) + std::min(wp * plo, wp * phi);
    const double hi = std::max(wb * blo, wb * bhi) + std::max(wp * plo, wp * phi);
    return {lo, hi};
  }

  // out = (H(s) - shift) in
  void apply(double s, double shift, std::span<const Complex> in, std::span<Complex> out) const {
    h_b_.apply(1.0 - s, in, out, false);
    h_p_.apply(s, in, out, true);
    if (shift != 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= shift * in[i];
  }

  // Dense H(s); complex in general, real when all payloads are real.
  Eigen::MatrixXcd dense(double s) const {
    const auto dim = dimension();
    Eigen::MatrixXcd m(dim, dim);
    Amplitudes e(dim), col(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      e[j] = 1.0;
      apply(s, 0.0, e, col);
      for (std::size_t i = 0; i < dim; ++i) m(i, j) = col[i];
      e[j] = 0.0;
    }
    return m;
  }

 private:
  HamiltonianTerm h_b_;
  HamiltonianTerm h_p_;
};

// H(s)|psi>. The result is generally not normalized, so it is returned as
// raw amplitudes rather than a StateVector.
inline Amplitudes apply_hamiltonian(const HamiltonianPair& pair, double s, std::span<const Complex> state) {
  if (!std::isfinite(s)) throw ParameterError("interpolation parameter must be finite");
  if (state.size() != pair.dimension())
    throw StructuralError("state dimension " + std::to_string(state.size()) +
                          " does not match Hamiltonian dimension " + std::to_string(pair.dimension()));
  Amplitudes out(state.size());
  pair.apply(s, 0.0, state, out);
  return out;
}

inline Amplitudes apply_hamiltonian(const HamiltonianPair& pair, double s, const StateVector& state) {
  return apply_hamiltonian(pair, s, state.amplitudes());
}

// <psi|H(s)|psi>
inline double energy_expectation(const HamiltonianPair& pair, double s, std::span<const Complex> state) {
  const auto h_psi = apply_hamiltonian(pair, s, state);
  return inner_product(state, h_psi).real();
}

inline double energy_expectation(const HamiltonianPair& pair, double s, const StateVector& state) {
  return energy_expectation(pair, s, state.amplitudes());
}

// The k lowest eigenvalues of H(s), ascending, by dense diagonalization.
inline std::vector<double> exact_spectrum(const HamiltonianPair& pair, double s, int k) {
  if (k < 1) throw ParameterError("requested eigenvalue count must be at least 1");
  const auto dim = pair.dimension();
  if (dim > kMaxDenseDimension)
    throw CapabilityError("dense diagonalization is limited to dimension " +
                          std::to_string(kMaxDenseDimension) + " (got " + std::to_string(dim) +
                          "); use the two-level analytic gap for easy Grover instances");
  if (static_cast<std::size_t>(k) > dim) throw ParameterError("more eigenvalues requested than the dimension");
  const Eigen::MatrixXcd h = pair.dense(s);
  Eigen::VectorXd evals;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real(), Eigen::EigenvaluesOnly);
    evals = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    evals = solver.eigenvalues();
  }
  return {evals.data(), evals.data() + k};
}

// --- time evolution ---------------------------------------------------------

template <class F>
concept ScheduleFunction = std::invocable<const F&, double> &&
                           std::convertible_to<std::invoke_result_t<const F&, double>, double>;

struct EvolutionSettings {
  double total_time = 1.0;
  int steps = 10'000;
  bool renormalize = false;
  int max_doublings = 3;

  static int minimum_steps(double total_time) { return static_cast<int>(std::ceil(20.0 * total_time)); }

  // max(10 000, ceil(20 T)) steps.
  static EvolutionSettings for_time(double total_time) {
    EvolutionSettings s;
    s.total_time = total_time;
    s.steps = std::max(10'000, minimum_steps(total_time));
    return s;
  }

  void validate() const {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ParameterError("total time must be positive");
    if (steps < minimum_steps(total_time))
      throw ParameterError("step count " + std::to_string(steps) + " is below ceil(20 T) = " +
                           std::to_string(minimum_steps(total_time)));
    if (max_doublings < 0) throw ParameterError("max_doublings must be non-negative");
  }
};

struct EvolutionResult {
  StateVector state;
  double norm_drift = 0.0;  // |norm - 1| before optional renormalization
  int steps_used = 0;
  // Present when snapshots were requested: state at x = k / snapshot_points, k = 0..snapshot_points.
  std::vector<Amplitudes> snapshots;
};

namespace detail {

// y <- y - i * a * w, on interleaved doubles.
inline void axpy_minus_i(double* out, const double* y, double a, const double* w, std::size_t n2) {
  for (std::size_t i = 0; i < n2; i += 2) {
    out[i] = y[i] + a * w[i + 1];
    out[i + 1] = y[i + 1] - a * w[i];
  }
}

// Fixed-step classical RK4 for i dpsi/dt = (H(s(t/T)) - c(s)) psi, where the
// scalar shift c(s) centers the spectral bounds. The shift only changes the
// global phase but keeps h * |lambda| small for every component.
template <ScheduleFunction F>
void rk4_propagate(const HamiltonianPair& pair, const F& schedule, double total_time, int steps, Amplitudes& y,
                   int snapshot_every, std::vector<Amplitudes>* snapshots) {
  const std::size_t dim = y.size();
  const std::size_t n2 = 2 * dim;
  Amplitudes w(dim), acc(dim), tmp(dim);
  double* yd = reinterpret_cast<double*>(y.data());
  double* wd = reinterpret_cast<double*>(w.data());
  double* ad = reinterpret_cast<double*>(acc.data());
  double* td = reinterpret_cast<double*>(tmp.data());
  const double h = total_time / steps;
  auto centered = [&](double s) {
    auto [lo, hi] = pair.spectral_bounds(s);
    return 0.5 * (lo + hi);
  };
  double s0 = static_cast<double>(schedule(0.0));
  if (snapshots) snapshots->push_back(y);
  for (int k = 0; k < steps; ++k) {
    const double x_mid = (2.0 * k + 1.0) / (2.0 * steps);
    const double x_end = k + 1 == steps ? 1.0 : static_cast<double>(k + 1) / steps;
    const double s_mid = static_cast<double>(schedule(x_mid));
    const double s_end = static_cast<double>(schedule(x_end));
    const double c0 = centered(s0), cm = centered(s_mid), ce = centered(s_end);

    pair.apply(s0, c0, y, w);
    std::copy(wd, wd + n2, ad);
    axpy_minus_i(td, yd, 0.5 * h, wd, n2);

    pair.apply(s_mid, cm, tmp, w);
    for (std::size_t i = 0; i < n2; ++i) ad[i] += 2.0 * wd[i];
    axpy_minus_i(td, yd, 0.5 * h, wd, n2);

    pair.apply(s_mid, cm, tmp, w);
    for (std::size_t i = 0; i < n2; ++i) ad[i] += 2.0 * wd[i];
    axpy_minus_i(td, yd, h, wd, n2);

    pair.apply(s_end, ce, tmp, w);
    for (std::size_t i = 0; i < n2; ++i) ad[i] += wd[i];
    axpy_minus_i(yd, yd, h / 6.0, ad, n2);

    s0 = s_end;
    if (snapshots && (k + 1) % snapshot_every == 0) snapshots->push_back(y);
  }
}

// Base step count scaled by how far the spectral width of H(s(x)) along the
// path exceeds its largest value for s in [0, 1] (the width is convex in s, so
// that maximum sits at an endpoint). Paths inside [0, 1] keep `steps`.
template <ScheduleFunction F, class Width>
int scaled_steps(int steps, const F& schedule, const Width& width, int max_doublings) {
  constexpr int kProbe = 2048;
  const double reference = std::max(width(0.0), width(1.0));
  double widest = reference;
  for (int k = 0; k <= kProbe; ++k) widest = std::max(widest, width(static_cast<double>(schedule(double(k) / kProbe))));
  if (!std::isfinite(widest)) throw ParameterError("schedule produced a non-finite value");
  const double scaled = std::ceil(steps * (widest / reference));
  if (scaled * std::ldexp(1.0, max_doublings) > std::numeric_limits<int>::max())
    throw IntegrationError("schedule leaves [0, 1] too far for a fixed-step integration", 0.0);
  return std::max(steps, static_cast<int>(scaled));
}

inline void check_drift(double drift) {
  if (!(drift <= kDriftFailure))
    throw IntegrationError("norm drift " + std::to_string(drift) +
                               " exceeds 1e-6; increase the step count",
                           drift);
}

}  // namespace detail

// Integrates i d|psi>/dt = H(s(t/T)) |psi> from `initial` over [0, T].
// settings.steps is the step count for paths inside [0, 1]; excursions beyond
// it raise the count in proportion to the spectral width of H. The count is then doubled (up to settings.max_doublings times) while the
// norm drift is at least 1e-9; a final drift above 1e-6 is an IntegrationError.
// With snapshot_points > 0 the step count is rounded up to a multiple of it
// and intermediate states are recorded.
template <ScheduleFunction F>
EvolutionResult evolve_detailed(const HamiltonianPair& pair, const F& schedule, const EvolutionSettings& settings,
                                const StateVector& initial, int snapshot_points = 0) {
  settings.validate();
  if (initial.dimension() != pair.dimension())
    throw StructuralError("initial state dimension does not match the Hamiltonian");
  if (snapshot_points < 0) throw ParameterError("snapshot count must be non-negative");
  int steps = detail::scaled_steps(settings.steps, schedule, [&](double s) {
    auto [lo, hi] = pair.spectral_bounds(s);
    return hi - lo;
  }, settings.max_doublings);
  if (snapshot_points > 0 && steps % snapshot_points != 0) steps += snapshot_points - steps % snapshot_points;
  for (int attempt = 0;; ++attempt) {
    Amplitudes y(initial.amplitudes().begin(), initial.amplitudes().end());
    std::vector<Amplitudes> snaps;
    detail::rk4_propagate(pair, schedule, settings.total_time, steps, y,
                          snapshot_points > 0 ? steps / snapshot_points : 0, snapshot_points > 0 ? &snaps : nullptr);
    const double nrm = aqcrl::norm(y);
    const double drift = std::abs(nrm - 1.0);
    if (drift < kDriftTarget || attempt >= settings.max_doublings) {
      detail::check_drift(drift);
      if (settings.renormalize)
        for (auto& z : y) z /= nrm;
      return {StateVector(initial.n_qubits(), std::move(y), kDriftFailure), drift, steps, std::move(snaps)};
    }
    steps *= 2;
  }
}

template <ScheduleFunction F>
StateVector evolve(const HamiltonianPair& pair, const F& schedule, const EvolutionSettings& settings,
                   const StateVector& initial) {
  return evolve_detailed(pair, schedule, settings, initial).state;
}

// Easy-Grover dynamics restricted to span{|m>, |psi_0>}.
struct TwoLevelResult {
  Complex target_amplitude;      // <m|psi(T)>
  Complex orthogonal_amplitude;  // component along the unit vector in span{|m>,|psi_0>} orthogonal to |m>
  double norm_drift = 0.0;
  int steps_used = 0;
  double success_probability() const { return std::norm(target_amplitude); }
};

// Same integrator as `evolve`, on the exact two-dimensional invariant
// subspace of the easy Grover problem. Cost is O(steps) for any n.
template <ScheduleFunction F>
TwoLevelResult evolve_two_level(int n_qubits, const F& schedule, const EvolutionSettings& settings) {
  settings.validate();
  if (n_qubits < 1 || n_qubits > 62) throw ParameterError("two-level qubit count must lie in [1, 62]");
  const double big_n = std::ldexp(1.0, n_qubits);
  const double a = 1.0 / std::sqrt(big_n);     // <m|psi_0>
  const double b = std::sqrt(1.0 - 1.0 / big_n);
  // Basis {|m>, |m_perp>}: H_B = [[b^2, -ab], [-ab, a^2]], H_P = diag(0, 1).
  // Spectra of both lie in [0, 1]; shift by 1/2 to center.
  const double hb00 = b * b - 0.5, hb01 = -a * b, hb11 = a * a - 0.5;
  auto rhs = [&](double s, Complex u0, Complex u1, Complex& d0, Complex& d1) {
    const double wb = 1.0 - s;
    const double h00 = wb * hb00 - 0.5 * s + 0.0;
    const double h01 = wb * hb01;
    const double h11 = wb * hb11 + 0.5 * s;
    // d = -i H u, with H real symmetric.
    const Complex v0 = h00 * u0 + h01 * u1;
    const Complex v1 = h01 * u0 + h11 * u1;
    d0 = {v0.imag(), -v0.real()};
    d1 = {v1.imag(), -v1.real()};
  };
  int steps = detail::scaled_steps(settings.steps, schedule, [&](double s) {
    const double wb = 1.0 - s;
    const double diag = wb * (hb00 - hb11) - s;
    const double off = wb * hb01;
    return std::sqrt(diag * diag + 4.0 * off * off);
  }, settings.max_doublings);
  for (int attempt = 0;; ++attempt) {
    Complex u0(a, 0.0), u1(b, 0.0);
    const double h = settings.total_time / steps;
    double s0 = static_cast<double>(schedule(0.0));
    for (int k = 0; k < steps; ++k) {
      const double s_mid = static_cast<double>(schedule((2.0 * k + 1.0) / (2.0 * steps)));
      const double s_end = static_cast<double>(schedule(k + 1 == steps ? 1.0 : static_cast<double>(k + 1) / steps));
      Complex k10, k11, k20, k21, k30, k31, k40, k41;
      rhs(s0, u0, u1, k10, k11);
      rhs(s_mid, u0 + 0.5 * h * k10, u1 + 0.5 * h * k11, k20, k21);
      rhs(s_mid, u0 + 0.5 * h * k20, u1 + 0.5 * h * k21, k30, k31);
      rhs(s_end, u0 + h * k30, u1 + h * k31, k40, k41);
      u0 += (h / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
      u1 += (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
      s0 = s_end;
    }
    const double nrm = std::sqrt(std::norm(u0) + std::norm(u1));
    const double drift = std::abs(nrm - 1.0);
    if (drift < kDriftTarget || attempt >= settings.max_doublings) {
      detail::check_drift(drift);
      if (settings.renormalize) {
        u0 /= nrm;
        u1 /= nrm;
      }
      return {u0, u1, drift, steps};
    }
    steps *= 2;
  }
}

}  // namespace aqcrl
