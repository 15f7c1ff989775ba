#pragma once

// Experiment drivers: the annealed deep-Q training loop, schedule
// evaluation, spectra along a path, infidelity statistics and transfer to
// larger registers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aqcrl/errors.hpp"
#include "aqcrl/parallel.hpp"
#include "aqcrl/problems.hpp"
#include "aqcrl/quantum_core.hpp"
#include "aqcrl/rl_agent.hpp"
#include "aqcrl/rng.hpp"
#include "aqcrl/schedule.hpp"
#include "aqcrl/statistics.hpp"

namespace aqcrl {

// Reference annealing times for easy Grover: the tabulated values at
// n = 1, 2, 4, 6, 8, 10, otherwise 497.8 * sqrt(2^(n - 10)).
inline double grover_reference_time(int n) {
  switch (n) {
    case 1: return 22.0;
    case 2: return 31.1;
    case 4: return 62.2;
    case 6: return 124.5;
    case 8: return 248.9;
    case 10: return 497.8;
    default:
      if (n < 1) throw ParameterError("qubit count must be positive");
      return 497.8 * std::sqrt(std::ldexp(1.0, n - 10));
  }
}

// --- training ------------------------------------------------------------------

struct TraceRow {
  int j = 0;  // annealing cycle, 1-based
  int i = 0;  // path-state iteration within the cycle, 1-based
  long step = 0;
  int proposed_action = 0;
  int action = 0;  // 0 when the proposal was rejected
  double delta = 0.0;
  double reward = 0.0;
  double epsilon = 0.0;
  double temperature = 0.0;
  double loss = std::numeric_limits<double>::quiet_NaN();  // NaN: no update this step
  bool training = true;
  bool target_refreshed = false;
  std::vector<double> b;  // path after the step

  friend bool operator==(const TraceRow& x, const TraceRow& y) {
    auto same = [](double p, double q) { return p == q || (std::isnan(p) && std::isnan(q)); };
    return x.j == y.j && x.i == y.i && x.step == y.step && x.proposed_action == y.proposed_action &&
           x.action == y.action && x.delta == y.delta && x.reward == y.reward && x.epsilon == y.epsilon &&
           x.temperature == y.temperature && same(x.loss, y.loss) && x.training == y.training &&
           x.target_refreshed == y.target_refreshed && x.b == y.b;
  }
};

// Everything the loop needs to continue exactly where it stopped.
struct AgentState {
  QNetwork net;
  QNetwork target;
  ReplayMemory memory{1};
  double epsilon = 0.0;
  double epsilon_max = 0.9;
  double temperature = 10.0;
  bool training = true;
  int next_j = 1;  // position of the next step
  int next_i = 1;
  long step = 0;  // completed path-state iterations
  long updates = 0;  // SGD steps taken
  long reward_evaluations = 0;
  Rng rng;
  PathState path = PathState::zeros(6);
  PathState best_path = PathState::zeros(6);
  double best_reward = -1.0;
  std::optional<long> threshold_step;  // step at which the reward first reached the threshold
  std::vector<TraceRow> trace;
};

struct TrainOptions {
  AgentConfig agent;
  ProblemSpec problem;
  std::uint64_t seed = 1;
  int jobs = 1;
  // Warm start: initial path and network parameters (both nets) of a previous run.
  std::optional<PathState> initial_path;
  std::optional<QNetwork> initial_network;
  bool stop_at_threshold = false;
  // Checked after every step; returning true ends the run there.
  std::function<bool(const AgentState&)> stop_when;
  // Called after every `checkpoint_every` completed cycles and, before the
  // exception propagates, when a step fails.
  int checkpoint_every = 0;
  std::function<void(const AgentState&)> on_checkpoint;
};

struct TrainResult {
  PathState best_path = PathState::zeros(6);
  double best_reward = 0.0;
  PathState final_path = PathState::zeros(6);
  std::optional<long> threshold_step;
  long reward_evaluations = 0;
  long updates = 0;
  AgentState state;
};

inline AgentState initial_agent_state(const TrainOptions& opt) {
  opt.agent.validate();
  opt.problem.validate();
  AgentState st;
  Rng init_rng(derive_seed(opt.seed, {1}));
  st.net = opt.initial_network ? *opt.initial_network : QNetwork::initialized(opt.agent.layer_sizes(), init_rng);
  if (st.net.layer_sizes() != opt.agent.layer_sizes())
    throw StructuralError("warm-start network shape does not match the agent configuration");
  st.target = st.net;
  st.memory = ReplayMemory(static_cast<std::size_t>(opt.agent.capacity));
  st.epsilon = 0.0;
  st.epsilon_max = opt.agent.epsilon_max;
  st.temperature = opt.agent.initial_temperature;
  st.rng = Rng(derive_seed(opt.seed, {2}));
  st.path = opt.initial_path ? *opt.initial_path : linear_schedule(opt.agent.cutoff);
  if (st.path.cutoff() != opt.agent.cutoff) throw StructuralError("initial path cutoff does not match the agent");
  st.best_path = st.path;
  return st;
}

namespace detail {

inline std::uint64_t reward_seed(std::uint64_t seed) { return derive_seed(seed, {3}); }

}  // namespace detail

// Runs (or resumes) the cycle loop: L_SA annealing cycles of L_PS path-state
// iterations each. Once a reward reaches the threshold, training stops, the
// temperature is frozen and epsilon climbs toward 1; the path keeps moving
// until the loop ends (or immediately stops with `stop_at_threshold`).
inline TrainResult run_training(const TrainOptions& opt, std::optional<AgentState> resume = std::nullopt) {
  const AgentConfig& cfg = opt.agent;
  AgentState st = resume ? std::move(*resume) : initial_agent_state(opt);
  if (resume) {
    cfg.validate();
    opt.problem.validate();
    if (st.net.layer_sizes() != cfg.layer_sizes()) throw StructuralError("checkpoint network does not match the agent");
  }
  const auto run_seed = detail::reward_seed(opt.seed);
  const double cooling = std::pow(10.0, -cfg.cooling_rate);
  std::uniform_real_distribution<double> delta_dist(0.0, cfg.delta0);

  bool stop = (opt.stop_at_threshold && st.threshold_step.has_value()) || (opt.stop_when && opt.stop_when(st));
  for (int j = st.next_j; j <= cfg.l_sa && !stop; ++j) {
    const double temperature_before = st.temperature;
    const double epsilon_before = st.epsilon;
    const bool fresh_cycle = st.next_i == 1;
    if (fresh_cycle) {
      if (st.training) st.temperature *= cooling;
      if (cfg.epsilon_reset_per_cycle && st.training) st.epsilon = 0.0;
    }
    for (int i = st.next_i; i <= cfg.l_ps; ++i) {
      const Rng rng_at_step = st.rng;
      std::optional<std::optional<Transition>> evicted;  // set once this step has pushed
      try {
        const Eigen::VectorXd q = q_forward(st.net, st.path);
        const ActionId proposed = select_action(q, st.epsilon, st.rng);
        const double delta = cfg.update_magnitude == UpdateMagnitude::Sampled ? delta_dist(st.rng) : cfg.delta0;
        PathState next = apply_action(st.path, proposed, delta, cfg.delta0);
        const double q_next = q_forward(st.net, next)(proposed.index);
        const bool accepted = acceptance_decision(q(proposed.index), q_next, delta, cfg.delta0, st.temperature, st.rng);
        const ActionId action = accepted ? proposed : ActionId{0};
        if (!accepted) next = st.path;

        const auto r = compute_reward(next, opt.problem, cfg, run_seed, static_cast<std::uint64_t>(st.step), opt.jobs);
        ++st.reward_evaluations;

        TraceRow row;
        row.j = j;
        row.i = i;
        row.step = st.step + 1;
        row.proposed_action = proposed.index;
        row.action = action.index;
        row.delta = delta;
        row.reward = r.reward;
        row.temperature = st.temperature;
        row.training = st.training;

        const auto b = st.path.coefficients();
        const auto nb = next.coefficients();
        evicted = st.memory.push({std::vector<double>(b.begin(), b.end()), action.index, r.reward,
                                  std::vector<double>(nb.begin(), nb.end())});
        if (st.training) {
          if (const auto loss = train_step(st.net, st.target, st.memory, cfg, st.rng)) {
            row.loss = *loss;
            ++st.updates;
          }
          if ((st.step + 1) % cfg.target_refresh == 0) {
            refresh_target(st.net, st.target);
            row.target_refreshed = true;
          }
        }
        st.epsilon = std::min(st.epsilon + cfg.epsilon_increment, st.epsilon_max);
        row.epsilon = st.epsilon;
        if (st.training && r.reward >= cfg.threshold) {
          st.training = false;
          st.epsilon_max = 1.0;
          st.threshold_step = st.step + 1;
        }
        if (r.reward > st.best_reward) {
          st.best_reward = r.reward;
          st.best_path = next;
        }
        st.path = std::move(next);
        row.b.assign(st.path.coefficients().begin(), st.path.coefficients().end());
        st.trace.push_back(std::move(row));
        ++st.step;
      } catch (...) {
        st.rng = rng_at_step;
        if (evicted) st.memory.undo_push(std::move(*evicted));
        if (fresh_cycle && i == 1) {
          st.temperature = temperature_before;
          st.epsilon = epsilon_before;
        }
        st.next_j = j;
        st.next_i = i;
        if (opt.on_checkpoint) opt.on_checkpoint(st);
        throw;
      }
      st.next_i = i + 1;
      if ((opt.stop_at_threshold && st.threshold_step) || (opt.stop_when && opt.stop_when(st))) {
        stop = true;
        break;
      }
    }
    if (!stop) {
      st.next_j = j + 1;
      st.next_i = 1;
    }
    if (opt.on_checkpoint && opt.checkpoint_every > 0 && !stop && j % opt.checkpoint_every == 0) opt.on_checkpoint(st);
  }

  TrainResult res;
  res.best_path = st.best_path;
  res.best_reward = st.best_reward;
  res.final_path = st.path;
  res.threshold_step = st.threshold_step;
  res.reward_evaluations = st.reward_evaluations;
  res.updates = st.updates;
  res.state = std::move(st);
  return res;
}

// --- checkpoints ---------------------------------------------------------------

inline constexpr int kCheckpointFormatVersion = 1;

inline nlohmann::json to_json(const TraceRow& r) {
  return {{"j", r.j},
          {"i", r.i},
          {"step", r.step},
          {"proposed_action", r.proposed_action},
          {"action", r.action},
          {"delta", r.delta},
          {"reward", r.reward},
          {"epsilon", r.epsilon},
          {"temperature", r.temperature},
          {"loss", std::isnan(r.loss) ? nlohmann::json(nullptr) : nlohmann::json(r.loss)},
          {"training", r.training},
          {"target_refreshed", r.target_refreshed},
          {"b", r.b}};
}

inline TraceRow trace_row_from_json(const nlohmann::json& j) {
  TraceRow r;
  r.j = j.at("j").get<int>();
  r.i = j.at("i").get<int>();
  r.step = j.at("step").get<long>();
  r.proposed_action = j.at("proposed_action").get<int>();
  r.action = j.at("action").get<int>();
  r.delta = j.at("delta").get<double>();
  r.reward = j.at("reward").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.temperature = j.at("temperature").get<double>();
  r.loss = j.at("loss").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("loss").get<double>();
  r.training = j.at("training").get<bool>();
  r.target_refreshed = j.at("target_refreshed").get<bool>();
  r.b = j.at("b").get<std::vector<double>>();
  return r;
}

inline std::vector<double> to_vector(const PathState& p) { return {p.coefficients().begin(), p.coefficients().end()}; }

inline nlohmann::json to_json(const AgentState& st) {
  nlohmann::json memory = nlohmann::json::array();
  for (const auto& t : st.memory.ordered()) memory.push_back(to_json(t));
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& r : st.trace) trace.push_back(to_json(r));
  nlohmann::json j = {{"format_version", kCheckpointFormatVersion},
                      {"layer_sizes", st.net.layer_sizes()},
                      {"theta", st.net.parameters()},
                      {"theta_target", st.target.parameters()},
                      {"epsilon", st.epsilon},
                      {"epsilon_max", st.epsilon_max},
                      {"temperature", st.temperature},
                      {"training", st.training},
                      {"next_j", st.next_j},
                      {"next_i", st.next_i},
                      {"step", st.step},
                      {"updates", st.updates},
                      {"reward_evaluations", st.reward_evaluations},
                      {"rng_state", rng_state(st.rng)},
                      {"path", to_vector(st.path)},
                      {"best_path", to_vector(st.best_path)},
                      {"best_reward", st.best_reward},
                      {"threshold_step", st.threshold_step ? nlohmann::json(*st.threshold_step) : nlohmann::json(nullptr)},
                      {"memory_capacity", st.memory.capacity()},
                      {"memory", std::move(memory)},
                      {"trace", std::move(trace)}};
  return j;
}

inline AgentState agent_state_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() > kCheckpointFormatVersion)
      throw ParseError("unsupported checkpoint format_version", 0, "format_version");
    AgentState st;
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    st.net = QNetwork(sizes);
    st.net.set_parameters(j.at("theta").get<std::vector<double>>());
    st.target = QNetwork(sizes);
    st.target.set_parameters(j.at("theta_target").get<std::vector<double>>());
    st.epsilon = j.at("epsilon").get<double>();
    st.epsilon_max = j.at("epsilon_max").get<double>();
    st.temperature = j.at("temperature").get<double>();
    st.training = j.at("training").get<bool>();
    st.next_j = j.at("next_j").get<int>();
    st.next_i = j.at("next_i").get<int>();
    st.step = j.at("step").get<long>();
    st.updates = j.at("updates").get<long>();
    st.reward_evaluations = j.at("reward_evaluations").get<long>();
    st.rng = rng_from_state(j.at("rng_state").get<std::string>());
    st.path = PathState(j.at("path").get<std::vector<double>>());
    st.best_path = PathState(j.at("best_path").get<std::vector<double>>());
    st.best_reward = j.at("best_reward").get<double>();
    if (!j.at("threshold_step").is_null()) st.threshold_step = j.at("threshold_step").get<long>();
    st.memory = ReplayMemory(j.at("memory_capacity").get<std::size_t>());
    for (const auto& t : j.at("memory")) st.memory.push(transition_from_json(t));
    for (const auto& r : j.at("trace")) st.trace.push_back(trace_row_from_json(r));
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

// --- evaluation ------------------------------------------------------------------

// Success probability of a Grover problem (easy: two-level reduction, hard:
// full register).
inline double evaluate_grover(const Schedule& schedule, const ProblemSpec& spec) {
  spec.validate();
  if (!spec.is_grover()) throw ParameterError("evaluate_grover needs a Grover problem");
  return instance_success(spec, schedule, 0);
}

struct SatEvaluation {
  int n_clauses = 0;
  std::vector<double> success;     // per instance, 0 for unsatisfiable ones
  std::vector<char> unsatisfiable;
  int unsatisfiable_count = 0;
  double mean = 0.0;  // over satisfiable instances
  double bootstrap_se = 0.0;

  std::vector<double> satisfiable_success() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < success.size(); ++k)
      if (!unsatisfiable[k]) out.push_back(success[k]);
    return out;
  }
};

// Instance k of clause count N_C uses the seed derive_seed(seed, {N_C, k}),
// so different schedules see the same instances.
inline std::uint64_t campaign_instance_seed(std::uint64_t seed, int n_clauses, std::size_t k) {
  return derive_seed(seed, {static_cast<std::uint64_t>(n_clauses), static_cast<std::uint64_t>(k)});
}

inline SatEvaluation evaluate_sat(const Schedule& schedule, const ProblemSpec& spec, int samples, std::uint64_t seed,
                                  int jobs = 1, int resamples = kDefaultBootstrapResamples) {
  spec.validate();
  if (spec.family != ProblemFamily::Sat3) throw ParameterError("evaluate_sat needs a 3-SAT problem");
  if (samples < 2) throw ParameterError("a SAT evaluation needs at least two instances");
  SatEvaluation ev;
  ev.n_clauses = spec.n_clauses;
  ev.success.assign(static_cast<std::size_t>(samples), 0.0);
  ev.unsatisfiable.assign(static_cast<std::size_t>(samples), 0);
  const auto settings = spec.evolution();
  parallel_for(static_cast<std::size_t>(samples), jobs, [&](std::size_t k) {
    const auto sat = sample_sat_instance(spec.n, spec.n_clauses, campaign_instance_seed(seed, spec.n_clauses, k));
    const auto p = sat_success(sat, schedule, settings);
    ev.success[k] = p.value;
    ev.unsatisfiable[k] = p.unsatisfiable;
  });
  for (char u : ev.unsatisfiable) ev.unsatisfiable_count += u;
  const auto ok = ev.satisfiable_success();
  if (ok.size() < 2) throw ParameterError("fewer than two satisfiable instances in the campaign");
  ev.mean = mean(ok);
  ev.bootstrap_se = bootstrap_mean_se(ok, resamples, derive_seed(seed, {0xB5ULL, static_cast<std::uint64_t>(spec.n_clauses)}));
  return ev;
}

// --- infidelity statistics ----------------------------------------------------------

struct InfidelityStats {
  int n_clauses = 0;
  std::vector<double> samples;  // 1 - success, satisfiable instances only
  int unsatisfiable_count = 0;
  double mean = 0.0;
  std::vector<double> rescaled;
  double second_moment = 0.0;
  double bootstrap_se = 0.0;  // of the second moment
  double ks_goe = 0.0;
};

inline InfidelityStats infidelity_stats(int n_clauses, std::vector<double> infidelities, int unsatisfiable_count,
                                        int resamples, std::uint64_t seed) {
  if (infidelities.size() < 2) throw ParameterError("infidelity statistics need at least two samples");
  InfidelityStats st;
  st.n_clauses = n_clauses;
  st.samples = std::move(infidelities);
  st.unsatisfiable_count = unsatisfiable_count;
  st.mean = mean(st.samples);
  st.rescaled = rescale_to_unit_mean(st.samples);
  st.second_moment = rescaled_second_moment(st.samples);
  st.bootstrap_se = bootstrap_se(st.samples, [](std::span<const double> s) { return rescaled_second_moment(s); },
                                 resamples, seed);
  st.ks_goe = ks_statistic_wigner_dyson(st.rescaled, WignerDysonEnsemble::GOE);
  return st;
}

inline InfidelityStats infidelity_stats(const SatEvaluation& ev, int resamples, std::uint64_t seed) {
  std::vector<double> inf;
  for (double p : ev.satisfiable_success()) inf.push_back(1.0 - p);
  return infidelity_stats(ev.n_clauses, std::move(inf), ev.unsatisfiable_count, resamples, seed);
}

// Per clause count in [clause_lo, clause_hi].
inline std::vector<InfidelityStats> infidelity_campaign(const Schedule& schedule, ProblemSpec spec, int clause_lo,
                                                        int clause_hi, int samples, std::uint64_t seed, int jobs = 1,
                                                        int resamples = kDefaultBootstrapResamples) {
  if (clause_lo < 1 || clause_hi < clause_lo) throw ParameterError("invalid clause range");
  if (samples < 1000) throw ParameterError("infidelity campaigns need at least 1000 instances per clause count");
  std::vector<InfidelityStats> out;
  for (int nc = clause_lo; nc <= clause_hi; ++nc) {
    spec.n_clauses = nc;
    const auto ev = evaluate_sat(schedule, spec, samples, seed, jobs, resamples);
    out.push_back(infidelity_stats(ev, resamples, derive_seed(seed, {0x5EULL, static_cast<std::uint64_t>(nc)})));
  }
  return out;
}

// Each block rescaled by its own mean, then concatenated.
inline std::vector<double> pooled_rescaled_infidelity(const std::vector<InfidelityStats>& blocks) {
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.rescaled.begin(), b.rescaled.end());
  return out;
}

// Second moment of the pooled rescaled sample and its bootstrap SE, where each
// resample redraws every block separately and rescales it by its own mean.
inline std::pair<double, double> pooled_second_moment(const std::vector<InfidelityStats>& blocks, int resamples,
                                                      std::uint64_t seed) {
  if (blocks.empty()) throw ParameterError("no infidelity blocks to pool");
  std::size_t total = 0;
  double acc = 0.0;
  for (const auto& b : blocks) {
    total += b.samples.size();
    acc += b.second_moment * static_cast<double>(b.samples.size());
  }
  const double value = acc / static_cast<double>(total);
  Rng rng(seed);
  std::vector<double> reps(static_cast<std::size_t>(resamples));
  std::vector<double> draw;
  for (auto& rep : reps) {
    double a = 0.0;
    for (const auto& b : blocks) {
      std::uniform_int_distribution<std::size_t> pick(0, b.samples.size() - 1);
      draw.resize(b.samples.size());
      for (auto& x : draw) x = b.samples[pick(rng)];
      a += rescaled_second_moment(draw) * static_cast<double>(draw.size());
    }
    rep = a / static_cast<double>(total);
  }
  return {value, stddev(reps)};
}

// Histograms of the rescaled infidelity on one shared binning.
inline std::vector<Histogram> rescaled_histograms(const std::vector<InfidelityStats>& blocks, double hi, int bins) {
  std::vector<Histogram> out;
  for (const auto& b : blocks) out.push_back(histogram(b.rescaled, 0.0, hi, bins));
  return out;
}

// --- spectra ---------------------------------------------------------------------------

struct SpectrumPoint {
  double x = 0.0;  // t / T
  double s = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double e_dyn = 0.0;
};

// Instantaneous lowest two levels along `schedule` and the energy of the
// evolving state, at x = k / (grid - 1).
inline std::vector<SpectrumPoint> spectrum_trace(const HamiltonianPair& pair, const Schedule& schedule,
                                                 const EvolutionSettings& settings, const StateVector& initial,
                                                 int grid) {
  if (grid < 2) throw ParameterError("spectrum grid needs at least two points");
  if (pair.dimension() < 2) throw ParameterError("spectrum needs at least two levels");
  const auto res = evolve_detailed(pair, schedule, settings, initial, grid - 1);
  std::vector<SpectrumPoint> out;
  for (int k = 0; k < grid; ++k) {
    SpectrumPoint p;
    p.x = static_cast<double>(k) / (grid - 1);
    p.s = schedule(p.x);
    const auto ev = exact_spectrum(pair, p.s, 2);
    p.e0 = ev[0];
    p.e1 = ev[1];
    p.e_dyn = energy_expectation(pair, p.s, res.snapshots[static_cast<std::size_t>(k)]);
    out.push_back(p);
  }
  return out;
}

// Hamiltonians and initial state of a problem spec (3-SAT: the instance with
// the given seed).
inline std::pair<HamiltonianPair, StateVector> problem_setup(const ProblemSpec& spec, std::uint64_t instance_seed = 0) {
  spec.validate();
  switch (spec.family) {
    case ProblemFamily::GroverEasy:
      return {build_hamiltonians(GroverInstance{spec.n, spec.target, GroverVariant::Easy}),
              StateVector::uniform_superposition(spec.n)};
    case ProblemFamily::GroverHard:
      return {build_hamiltonians(GroverInstance{spec.n, spec.target, GroverVariant::Hard}),
              StateVector::uniform_superposition(spec.n)};
    case ProblemFamily::Sat3:
      return {build_hamiltonians(sample_sat_instance(spec.n, spec.n_clauses, instance_seed)),
              StateVector::uniform_superposition(spec.n)};
  }
  throw ParameterError("unknown problem family");
}

// --- transfer -----------------------------------------------------------------------

struct TransferRow {
  int n = 0;
  double total_time = 0.0;
  double infidelity_rl = 0.0;
  double infidelity_linear = 0.0;
};

// Easy Grover at every n in [n_lo, n_hi] with T = T_source * sqrt(2^(n - n_source)),
// by two-level simulation.
inline std::vector<TransferRow> transfer_study(const ScheduleRecord& source, int n_lo, int n_hi, int min_steps = 10'000) {
  if (n_lo < 1 || n_hi < n_lo) throw ParameterError("invalid transfer range");
  std::vector<TransferRow> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto target = rescale_for_qubits(source, n);
    ProblemSpec spec;
    spec.family = ProblemFamily::GroverEasy;
    spec.n = n;
    spec.total_time = target.total_time;
    spec.min_steps = min_steps;
    TransferRow row;
    row.n = n;
    row.total_time = target.total_time;
    row.infidelity_rl = 1.0 - evaluate_grover(Schedule(target.path), spec);
    row.infidelity_linear = 1.0 - evaluate_grover(Schedule::linear(target.path.cutoff()), spec);
    out.push_back(row);
  }
  return out;
}

}  // namespace aqcrl
