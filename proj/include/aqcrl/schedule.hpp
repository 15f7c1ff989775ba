#pragma once

// Annealing schedules s(x), x = t/T in [0, 1]:
//   * the Fourier path s(x) = x + sum_m b_m sin(m pi x) explored by the agent,
//   * the linear path (b = 0),
//   * the local-adiabatic (Roland-Cerf) path for the easy Grover problem.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// Boost 1.74's pchip calls isnan unqualified; <math.h> provides ::isnan.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "aqcrl/errors.hpp"

namespace aqcrl {

inline constexpr int kMaxCutoff = 16;

// Fourier coefficients b_1..b_C of the path.
class PathState {
 public:
  explicit PathState(std::vector<double> coefficients) : b_(std::move(coefficients)) {
    if (b_.empty() || static_cast<int>(b_.size()) > kMaxCutoff)
      throw ParameterError("path cutoff must lie in [1, " + std::to_string(kMaxCutoff) + "]");
    for (double v : b_)
      if (!std::isfinite(v)) throw ParameterError("path coefficients must be finite");
  }

  static PathState zeros(int cutoff) {
    if (cutoff < 1) throw ParameterError("path cutoff must be positive");
    return PathState(std::vector<double>(static_cast<std::size_t>(cutoff), 0.0));
  }

  int cutoff() const noexcept { return static_cast<int>(b_.size()); }
  std::span<const double> coefficients() const noexcept { return b_; }
  // b_m for m = 1..C
  double coefficient(int m) const { return b_.at(static_cast<std::size_t>(m - 1)); }

  // s(x); x must lie in [0, 1]. The endpoints are exact.
  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("schedule argument must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double theta = std::numbers::pi * x;
    const double c2 = 2.0 * std::cos(theta);
    double s_prev = 0.0;               // sin(0)
    double s_cur = std::sin(theta);    // sin(theta)
    double value = x;
    for (double bm : b_) {
      value += bm * s_cur;
      const double s_next = c2 * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    return value;
  }

  friend bool operator==(const PathState&, const PathState&) = default;

 private:
  std::vector<double> b_;
};

inline double evaluate_s(const PathState& path, double x) { return path(x); }

inline PathState linear_schedule(int cutoff = 6) { return PathState::zeros(cutoff); }

// 0 is the identity; 2m-1 decrements and 2m increments b_m (m >= 1).
struct ActionId {
  int index = 0;

  static int count(int cutoff) { return 2 * cutoff + 1; }
  int mode() const { return (index + 1) / 2; }        // m, 0 for identity
  int sign() const { return index == 0 ? 0 : (index % 2 == 1 ? -1 : +1); }
  friend bool operator==(ActionId, ActionId) = default;
};

inline PathState apply_action(const PathState& path, ActionId action, double magnitude, double max_magnitude) {
  if (action.index < 0 || action.index > 2 * path.cutoff())
    throw ParameterError("action index " + std::to_string(action.index) + " out of range for cutoff " +
                         std::to_string(path.cutoff()));
  if (!(magnitude >= 0.0 && magnitude <= max_magnitude))
    throw ParameterError("update magnitude must lie in [0, delta0]");
  if (action.index == 0) return path;
  std::vector<double> b(path.coefficients().begin(), path.coefficients().end());
  b[static_cast<std::size_t>(action.mode() - 1)] += action.sign() * magnitude;
  return PathState(std::move(b));
}

// Instantaneous easy-Grover gap g(s) = sqrt(1 - 4 (1 - 1/N) s (1 - s)).
inline double grover_gap(double big_n, double s) { return std::sqrt(1.0 - 4.0 * (1.0 - 1.0 / big_n) * s * (1.0 - s)); }

// s(x) tabulated on a uniform grid, monotone cubic (PCHIP) in between.
class TabulatedSchedule {
 public:
  explicit TabulatedSchedule(std::vector<double> values) : values_(values) {
    if (values_.size() < 4) throw ParameterError("a tabulated schedule needs at least 4 samples");
    std::vector<double> xs(values_.size());
    const double last = static_cast<double>(values_.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / last;
    xs.back() = 1.0;
    interp_ = std::make_shared<Interp>(std::move(xs), std::move(values));
  }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("schedule argument must lie in [0, 1]");
    return (*interp_)(x);
  }
  double derivative(double x) const { return interp_->prime(x); }
  std::span<const double> samples() const noexcept { return values_; }

 private:
  using Interp = boost::math::interpolators::pchip<std::vector<double>>;
  std::vector<double> values_;
  std::shared_ptr<const Interp> interp_;
};

// Local-adiabatic schedule: ds/dx = Z g(s)^2 with Z = int_0^1 ds / g(s)^2,
// integrated with RK4 on a uniform x grid and pinned to s(0)=0, s(1)=1.
inline TabulatedSchedule roland_cerf_schedule(int n_qubits, int samples = 10'001) {
  if (n_qubits < 1 || n_qubits > 62) throw ParameterError("Roland-Cerf schedule needs 1 <= n <= 62");
  if (samples < 100) throw ParameterError("Roland-Cerf tabulation needs at least 100 samples");
  const double big_n = std::ldexp(1.0, n_qubits);
  auto inv_gap2 = [&](double s) {
    const double g = grover_gap(big_n, s);
    return 1.0 / (g * g);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double z = 2.0 * GK::integrate(inv_gap2, 0.0, 0.5, 20, 1e-14);
  auto rate = [&](double s) {
    const double g = grover_gap(big_n, s);
    return z * g * g;
  };
  const int intervals = samples - 1;
  // Steep ends at large N need finer internal steps.
  const int sub = std::max(4, static_cast<int>(std::ceil(std::sqrt(big_n) / 32.0)) * 4);
  const double h = 1.0 / (static_cast<double>(intervals) * sub);
  std::vector<double> s(static_cast<std::size_t>(samples), 0.0);
  double cur = 0.0;
  for (int i = 0; i < intervals; ++i) {
    for (int k = 0; k < sub; ++k) {
      const double k1 = rate(cur);
      const double k2 = rate(cur + 0.5 * h * k1);
      const double k3 = rate(cur + 0.5 * h * k2);
      const double k4 = rate(cur + h * k3);
      cur += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s[static_cast<std::size_t>(i + 1)] = cur;
  }
  const double end = s.back();
  for (auto& v : s) v /= end;
  s.back() = 1.0;
  return TabulatedSchedule(std::move(s));
}

// Any schedule the simulator and the experiment drivers accept.
class Schedule {
 public:
  enum class Kind { Linear, Fourier, RolandCerf };

  Schedule(PathState path, Kind kind = Kind::Fourier) : kind_(kind), impl_(std::move(path)) {}
  Schedule(TabulatedSchedule table) : kind_(Kind::RolandCerf), impl_(std::move(table)) {}

  static Schedule linear(int cutoff = 6) { return {PathState::zeros(cutoff), Kind::Linear}; }
  static Schedule roland_cerf(int n_qubits) { return Schedule(roland_cerf_schedule(n_qubits)); }

  double operator()(double x) const {
    return std::visit([x](const auto& f) { return f(x); }, impl_);
  }
  Kind kind() const noexcept { return kind_; }
  const PathState* path() const noexcept { return std::get_if<PathState>(&impl_); }

 private:
  Kind kind_;
  std::variant<PathState, TabulatedSchedule> impl_;
};

inline const char* to_string(Schedule::Kind k) {
  switch (k) {
    case Schedule::Kind::Linear: return "linear";
    case Schedule::Kind::Fourier: return "rl";
    case Schedule::Kind::RolandCerf: return "roland-cerf";
  }
  return "unknown";
}

// --- schedule records ---------------------------------------------------------

inline constexpr int kScheduleFormatVersion = 1;

struct ScheduleRecord {
  std::string problem = "grover";  // "grover" | "sat3"
  std::string variant = "easy";    // "easy" | "hard" for Grover, "" for 3-SAT
  int n = 1;                       // qubits (Grover) or bits (3-SAT)
  double total_time = 1.0;
  PathState path = PathState::zeros(6);
  std::optional<int> n_clauses;
  std::optional<std::uint64_t> seed;
};

inline nlohmann::json to_json(const ScheduleRecord& r) {
  nlohmann::json j = {{"format_version", kScheduleFormatVersion},
                      {"problem", r.problem},
                      {"variant", r.variant},
                      {"n", r.n},
                      {"T", r.total_time},
                      {"C", r.path.cutoff()},
                      {"b", std::vector<double>(r.path.coefficients().begin(), r.path.coefficients().end())}};
  if (r.n_clauses) j["n_clauses"] = *r.n_clauses;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

inline std::string serialize_schedule(const ScheduleRecord& r) { return to_json(r).dump(2); }

inline ScheduleRecord schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("schedule record must be a JSON object");
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ParseError(std::string("schedule record is missing field \"") + key + "\"", 0, key);
    return j.at(key);
  };
  ScheduleRecord r;
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() > kScheduleFormatVersion)
      throw ParseError("unsupported schedule format_version", 0, "format_version");
    r.problem = field("problem").get<std::string>();
    r.variant = field("variant").get<std::string>();
    r.n = field("n").get<int>();
    r.total_time = field("T").get<double>();
    const int c = field("C").get<int>();
    auto b = field("b").get<std::vector<double>>();
    if (static_cast<int>(b.size()) != c)
      throw ParseError("schedule record field \"b\" has " + std::to_string(b.size()) + " entries but C = " +
                           std::to_string(c),
                       0, "b");
    r.path = PathState(std::move(b));
    if (j.contains("n_clauses")) r.n_clauses = j.at("n_clauses").get<int>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule record has a malformed field: ") + e.what());
  } catch (const ParameterError& e) {
    throw ParseError(std::string("schedule record is invalid: ") + e.what(), 0, "b");
  }
  if (r.problem != "grover" && r.problem != "sat3")
    throw ParseError("schedule record has unknown problem \"" + r.problem + "\"", 0, "problem");
  if (!(r.total_time > 0.0)) throw ParseError("schedule record field \"T\" must be positive", 0, "T");
  return r;
}

inline ScheduleRecord deserialize_schedule(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schedule record is not valid JSON: ") + e.what(), e.byte);
  }
  return schedule_from_json(j);
}

// Same coefficients, total time rescaled by sqrt(2^n_target / 2^n).
inline ScheduleRecord rescale_for_qubits(const ScheduleRecord& r, int n_target) {
  ScheduleRecord out = r;
  out.total_time = r.total_time * std::sqrt(std::ldexp(1.0, n_target - r.n));
  out.n = n_target;
  return out;
}

}  // namespace aqcrl
