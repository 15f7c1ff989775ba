#pragma once

// Deep-Q agent over Fourier path states: a small fully connected Q-network
// with a delayed target copy, uniform experience replay, epsilon-greedy
// action choice and the annealed acceptance rule for proposed moves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aqcrl/errors.hpp"
#include "aqcrl/parallel.hpp"
#include "aqcrl/problems.hpp"
#include "aqcrl/quantum_core.hpp"
#include "aqcrl/rng.hpp"
#include "aqcrl/schedule.hpp"

namespace aqcrl {

// --- problem specification ---------------------------------------------------

enum class ProblemFamily { GroverEasy, GroverHard, Sat3 };

inline const char* to_string(ProblemFamily f) {
  switch (f) {
    case ProblemFamily::GroverEasy: return "grover-easy";
    case ProblemFamily::GroverHard: return "grover-hard";
    case ProblemFamily::Sat3: return "sat3";
  }
  return "unknown";
}

inline ProblemFamily problem_family_from_string(const std::string& s) {
  if (s == "grover-easy") return ProblemFamily::GroverEasy;
  if (s == "grover-hard") return ProblemFamily::GroverHard;
  if (s == "sat3") return ProblemFamily::Sat3;
  throw ParameterError("unknown problem family \"" + s + "\" (expected grover-easy, grover-hard or sat3)");
}

// What the simulator is asked to solve, and how finely it integrates.
struct ProblemSpec {
  ProblemFamily family = ProblemFamily::GroverEasy;
  int n = 4;             // qubits for Grover, bits for 3-SAT
  int n_clauses = 3;     // 3-SAT only
  double total_time = 62.2;
  std::uint64_t target = 0;  // Grover only
  int min_steps = 10'000;    // floor of the RK4 step rule max(min_steps, ceil(20 T))

  bool is_grover() const { return family != ProblemFamily::Sat3; }

  EvolutionSettings evolution() const {
    EvolutionSettings s;
    s.total_time = total_time;
    s.steps = std::max(min_steps, EvolutionSettings::minimum_steps(total_time));
    return s;
  }

  void validate() const {
    if (family == ProblemFamily::Sat3) {
      if (n < 3) throw ParameterError("3-SAT needs at least 3 bits");
      if (n_clauses < 1) throw ParameterError("3-SAT needs at least one clause");
    }
    dimension_for(n);
    if (!(total_time > 0.0)) throw ParameterError("total time must be positive");
    if (min_steps < 1) throw ParameterError("min_steps must be positive");
  }
};

// --- hyperparameters -----------------------------------------------------------

enum class UpdateMagnitude { Sampled, Fixed };

struct AgentConfig {
  int cutoff = 6;
  int hidden_layers = 1;  // weight layers = hidden_layers + 1
  int hidden_neurons = 20;
  double learning_rate = 0.01;
  int batch_size = 32;
  double gamma = 0.9;
  int capacity = 500;
  double epsilon_max = 0.9;
  double epsilon_increment = 0.01;
  int target_refresh = 50;
  double cooling_rate = 0.1;
  double initial_temperature = 10.0;
  double delta0 = 0.1;
  int mi = 1;
  int l_sa = 80;
  int l_ps = 1000;
  double threshold = 0.999;
  UpdateMagnitude update_magnitude = UpdateMagnitude::Sampled;
  bool epsilon_reset_per_cycle = false;
  bool bernoulli_reward = false;

  // Default hyperparameters per family.
  static AgentConfig for_problem(ProblemFamily family) {
    AgentConfig c;
    if (family == ProblemFamily::Sat3) {
      c.hidden_layers = 2;
      c.hidden_neurons = 12;
      c.capacity = 1000;
      c.mi = 100;
    }
    return c;
  }

  std::vector<int> layer_sizes() const {
    std::vector<int> sizes{cutoff};
    for (int i = 0; i < hidden_layers; ++i) sizes.push_back(hidden_neurons);
    sizes.push_back(ActionId::count(cutoff));
    return sizes;
  }

  void validate() const {
    auto positive = [](bool ok, const char* name) {
      if (!ok) throw ParameterError(std::string("agent parameter ") + name + " is out of range");
    };
    positive(cutoff >= 1 && cutoff <= kMaxCutoff, "cutoff");
    positive(hidden_layers >= 0, "hidden_layers");
    positive(hidden_neurons >= 1, "hidden_neurons");
    positive(learning_rate > 0.0, "learning_rate");
    positive(batch_size >= 1, "batch_size");
    positive(gamma > 0.0 && gamma < 1.0, "gamma");
    positive(capacity >= 1, "capacity");
    positive(epsilon_max > 0.0 && epsilon_max <= 1.0, "epsilon_max");
    positive(epsilon_increment > 0.0, "epsilon_increment");
    positive(target_refresh >= 1, "target_refresh");
    positive(cooling_rate > 0.0, "cooling_rate");
    positive(initial_temperature > 0.0, "initial_temperature");
    positive(delta0 > 0.0, "delta0");
    positive(mi >= 1, "mi");
    positive(l_sa >= 1, "l_sa");
    positive(l_ps >= 1, "l_ps");
    positive(threshold > 0.0 && threshold <= 1.0, "threshold");
  }
};

// --- Q-network -------------------------------------------------------------------

// Fully connected network, rectifier on hidden layers, identity on the output.
class QNetwork {
 public:
  QNetwork() = default;

  // All parameters zero.
  explicit QNetwork(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw StructuralError("a network needs an input and an output layer");
    for (int s : sizes_)
      if (s < 1) throw StructuralError("layer widths must be positive");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
      biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
    }
  }

  // Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static QNetwork initialized(std::vector<int> layer_sizes, Rng& rng) {
    QNetwork net(std::move(layer_sizes));
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
      std::uniform_real_distribution<double> dist(-bound, bound);
      auto& w = net.weights_[l];
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
      for (Eigen::Index i = 0; i < net.biases_[l].size(); ++i) net.biases_[l](i) = dist(rng);
    }
    return net;
  }

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int input_width() const { return sizes_.front(); }
  int output_width() const { return sizes_.back(); }
  std::size_t layers() const noexcept { return weights_.size(); }

  Eigen::MatrixXd& weight(std::size_t l) { return weights_.at(l); }
  const Eigen::MatrixXd& weight(std::size_t l) const { return weights_.at(l); }
  Eigen::VectorXd& bias(std::size_t l) { return biases_.at(l); }
  const Eigen::VectorXd& bias(std::size_t l) const { return biases_.at(l); }

  // Columns of `inputs` are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != input_width()) throw StructuralError("network input width mismatch");
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd z = weights_[l] * a;
      z.colwise() += biases_[l];
      a = (l + 1 < weights_.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a;
  }

  Eigen::VectorXd forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_width())
      throw StructuralError("network input width " + std::to_string(input_width()) + " does not match input of length " +
                            std::to_string(input.size()));
    Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
    return forward_batch(x).col(0);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  // Flattened as [W_0 (column-major), b_0, W_1, b_1, ...].
  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      p.insert(p.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
      p.insert(p.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw StructuralError("parameter vector length mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), weights_[l].size(), weights_[l].data());
      k += static_cast<std::size_t>(weights_[l].size());
      std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), biases_[l].size(), biases_[l].data());
      k += static_cast<std::size_t>(biases_[l].size());
    }
  }

  bool all_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
  }

  friend bool operator==(const QNetwork& a, const QNetwork& b) {
    return a.sizes_ == b.sizes_ && a.parameters() == b.parameters();
  }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

inline Eigen::VectorXd q_forward(const QNetwork& net, const PathState& path) {
  if (net.input_width() != path.cutoff()) throw StructuralError("network input width does not match the path cutoff");
  return net.forward(path.coefficients());
}

// Flattened in the same order as QNetwork::parameters().
using ParameterGradient = std::vector<double>;

// Mean squared TD error  L = (1/B) sum_i (y_i - Q(x_i)[a_i])^2  and, when
// `gradient` is non-null, dL/dtheta by backpropagation.
inline double td_loss(const QNetwork& net, const Eigen::MatrixXd& inputs, std::span<const int> actions,
                      std::span<const double> targets, ParameterGradient* gradient = nullptr) {
  const auto batch = inputs.cols();
  if (static_cast<std::size_t>(batch) != actions.size() || actions.size() != targets.size() || batch == 0)
    throw StructuralError("batch inputs, actions and targets must have equal nonzero length");
  const std::size_t layers = net.layers();
  std::vector<Eigen::MatrixXd> act{inputs};  // activations per layer
  std::vector<Eigen::MatrixXd> pre;          // pre-activations
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = net.weight(l) * act.back();
    z.colwise() += net.bias(l);
    pre.push_back(z);
    act.push_back(l + 1 < layers ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
  }
  const Eigen::MatrixXd& out = act.back();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(out.rows(), batch);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= out.rows()) throw StructuralError("action index outside the network output");
    const double err = targets[static_cast<std::size_t>(i)] - out(a, i);
    loss += err * err;
    delta(a, i) = -2.0 * err / static_cast<double>(batch);
  }
  loss /= static_cast<double>(batch);
  if (!gradient) return loss;

  std::vector<Eigen::MatrixXd> gw(layers);
  std::vector<Eigen::VectorXd> gb(layers);
  for (std::size_t l = layers; l-- > 0;) {
    gw[l] = delta * act[l].transpose();
    gb[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = net.weight(l).transpose() * delta;
      delta = delta.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  gradient->clear();
  gradient->reserve(net.parameter_count());
  for (std::size_t l = 0; l < layers; ++l) {
    gradient->insert(gradient->end(), gw[l].data(), gw[l].data() + gw[l].size());
    gradient->insert(gradient->end(), gb[l].data(), gb[l].data() + gb[l].size());
  }
  return loss;
}

inline void refresh_target(const QNetwork& net, QNetwork& target_net) {
  if (net.layer_sizes() != target_net.layer_sizes())
    throw StructuralError("target network shape differs from the predict network");
  target_net = net;
}

// --- replay memory -------------------------------------------------------------

struct Transition {
  std::vector<double> b;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_b;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Fixed-capacity ring buffer; the oldest transition is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ParameterError("replay capacity must be positive");
    entries_.reserve(capacity_);
  }

  // Returns the evicted transition, if any, for undo_push.
  std::optional<Transition> push(Transition t) {
    if (entries_.size() < capacity_) {
      entries_.push_back(std::move(t));
      return std::nullopt;
    }
    std::optional<Transition> evicted = std::move(entries_[head_]);
    entries_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
    return evicted;
  }

  // Reverts the latest push.
  void undo_push(std::optional<Transition> evicted) {
    if (entries_.empty()) throw ParameterError("nothing to undo in replay memory");
    if (!evicted) {
      entries_.pop_back();
      return;
    }
    head_ = (head_ + capacity_ - 1) % capacity_;
    entries_[head_] = std::move(*evicted);
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const {
    if (i >= entries_.size()) throw ParameterError("replay index out of range");
    return entries_[(head_ + i) % entries_.size()];
  }

  // batch_size distinct transitions, uniformly; empty when too few are stored.
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const {
    if (batch_size == 0 || entries_.size() < batch_size) return {};
    std::vector<std::size_t> idx(entries_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::size_t> picked(batch_size);
    std::sample(idx.begin(), idx.end(), picked.begin(), batch_size, rng);
    std::vector<const Transition*> out;
    out.reserve(batch_size);
    for (auto i : picked) out.push_back(&entries_[i]);
    return out;
  }

  // Oldest first.
  std::vector<Transition> ordered() const {
    std::vector<Transition> out;
    out.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) out.push_back(at(i));
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<Transition> entries_;
  std::size_t head_ = 0;
};

// --- policy ------------------------------------------------------------------------

// With probability epsilon the greedy action (lowest index on ties),
// otherwise uniform over all actions.
inline ActionId select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw ParameterError("cannot select from an empty Q-value vector");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0, 1]");
  if (uniform01(rng) < epsilon)
    return {static_cast<int>(std::max_element(q_values.begin(), q_values.end()) - q_values.begin())};
  std::uniform_int_distribution<int> pick(0, static_cast<int>(q_values.size()) - 1);
  return {pick(rng)};
}

inline ActionId select_action(const Eigen::VectorXd& q_values, double epsilon, Rng& rng) {
  return select_action(std::span<const double>(q_values.data(), static_cast<std::size_t>(q_values.size())), epsilon,
                       rng);
}

// e = (q_next - q_current) / delta0 * delta, accepted iff mu <= exp(e / Tem)
// with mu uniform in [0, 1].
inline double acceptance_energy(double q_current, double q_next, double delta, double delta0) {
  return (q_next - q_current) / delta0 * delta;
}

inline bool acceptance_decision(double q_current, double q_next, double delta, double delta0, double temperature,
                                Rng& rng) {
  if (!(temperature > 0.0)) throw ParameterError("annealing temperature must be positive");
  if (!(delta >= 0.0 && delta <= delta0)) throw ParameterError("delta must lie in [0, delta0]");
  const double e = acceptance_energy(q_current, q_next, delta, delta0);
  const double mu = uniform01(rng);
  return mu <= std::exp(e / temperature);
}

// One SGD step on the TD loss over a uniformly sampled batch. Returns the
// pre-step loss, or nullopt (no update) when memory holds fewer than
// batch_size transitions. The network is left untouched when the update
// would make it non-finite.
inline std::optional<double> train_step(QNetwork& net, const QNetwork& target_net, const ReplayMemory& memory,
                                        const AgentConfig& config, Rng& rng) {
  const auto batch = memory.sample(static_cast<std::size_t>(config.batch_size), rng);
  if (batch.empty()) return std::nullopt;
  const auto width = net.input_width();
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd inputs(width, n), next(width, n);
  std::vector<int> actions(batch.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = *batch[static_cast<std::size_t>(i)];
    if (static_cast<int>(t.b.size()) != width || static_cast<int>(t.next_b.size()) != width)
      throw StructuralError("stored transition width does not match the network");
    inputs.col(i) = Eigen::Map<const Eigen::VectorXd>(t.b.data(), width);
    next.col(i) = Eigen::Map<const Eigen::VectorXd>(t.next_b.data(), width);
    actions[static_cast<std::size_t>(i)] = t.action;
  }
  const Eigen::MatrixXd q_next = target_net.forward_batch(next);
  std::vector<double> targets(batch.size());
  for (Eigen::Index i = 0; i < n; ++i)
    targets[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i)]->reward + config.gamma * q_next.col(i).maxCoeff();
  ParameterGradient grad;
  const double loss = td_loss(net, inputs, actions, targets, &grad);
  auto theta = net.parameters();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    theta[k] -= config.learning_rate * grad[k];
    if (!std::isfinite(theta[k])) throw IntegrationError("Q-network parameters became non-finite", 0.0);
  }
  net.set_parameters(theta);
  return loss;
}

// --- reward --------------------------------------------------------------------------

struct RewardResult {
  double reward = 0.0;
  int unsatisfiable = 0;  // instances without a solution (contribute 0)
};

// Success probability of a single instance under `schedule`.
template <ScheduleFunction F>
double instance_success(const ProblemSpec& spec, const F& schedule, std::uint64_t instance_seed, bool* unsat = nullptr) {
  const auto settings = spec.evolution();
  switch (spec.family) {
    case ProblemFamily::GroverEasy:
      return std::min(1.0, evolve_two_level(spec.n, schedule, settings).success_probability());
    case ProblemFamily::GroverHard: {
      const GroverInstance g{spec.n, spec.target, GroverVariant::Hard};
      const auto pair = build_hamiltonians(g);
      const auto psi = evolve(pair, schedule, settings, StateVector::uniform_superposition(spec.n));
      return success_probability(psi, g).value;
    }
    case ProblemFamily::Sat3: {
      const auto p = sat_success(sample_sat_instance(spec.n, spec.n_clauses, instance_seed), schedule, settings);
      if (unsat) *unsat = p.unsatisfiable;
      return p.value;
    }
  }
  return 0.0;
}

// Mean success probability over config.mi instances. Grover instances are
// all equivalent (fixed target); 3-SAT instances are sampled with seeds
// derived from (run_seed, step, instance index).
inline RewardResult compute_reward(const PathState& path, const ProblemSpec& spec, const AgentConfig& config,
                                   std::uint64_t run_seed, std::uint64_t step, int jobs = 1) {
  spec.validate();
  const auto mi = static_cast<std::size_t>(config.mi);
  std::vector<double> success(mi, 0.0);
  std::vector<char> unsat(mi, 0);
  if (spec.is_grover()) {
    const double p = instance_success(spec, path, 0);
    std::fill(success.begin(), success.end(), p);
  } else {
    parallel_for(mi, jobs, [&](std::size_t i) {
      bool u = false;
      success[i] = instance_success(spec, path, derive_seed(run_seed, {step, i}), &u);
      unsat[i] = u;
    });
  }
  RewardResult r;
  double acc = 0.0;
  for (std::size_t i = 0; i < mi; ++i) {
    double v = success[i];
    if (config.bernoulli_reward) {
      Rng draw(derive_seed(run_seed, {step, i, 0xB0B0ULL}));
      v = uniform01(draw) < v ? 1.0 : 0.0;
    }
    acc += v;
    r.unsatisfiable += unsat[i];
  }
  r.reward = acc / static_cast<double>(mi);
  return r;
}

// --- serialization ---------------------------------------------------------------------

inline nlohmann::json to_json(const QNetwork& net) {
  return {{"layer_sizes", net.layer_sizes()}, {"parameters", net.parameters()}};
}

inline QNetwork network_from_json(const nlohmann::json& j) {
  QNetwork net(j.at("layer_sizes").get<std::vector<int>>());
  net.set_parameters(j.at("parameters").get<std::vector<double>>());
  return net;
}

inline nlohmann::json to_json(const Transition& t) {
  return {{"b", t.b}, {"a", t.action}, {"r", t.reward}, {"next_b", t.next_b}};
}

inline Transition transition_from_json(const nlohmann::json& j) {
  return {j.at("b").get<std::vector<double>>(), j.at("a").get<int>(), j.at("r").get<double>(),
          j.at("next_b").get<std::vector<double>>()};
}

}  // namespace aqcrl
