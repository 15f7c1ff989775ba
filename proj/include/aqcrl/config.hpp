#pragma once

// Run configuration: an INI file with [agent], [problem], [evolution] and
// [run] sections, overridden by AQCRL_<SECTION>_<KEY> environment variables
// and then by command-line assignments. Unset keys take the defaults of
// the chosen problem family.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "aqcrl/artifacts.hpp"
#include "aqcrl/errors.hpp"
#include "aqcrl/rl_agent.hpp"

namespace aqcrl {

// Every recognised key, as "section.key".
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "agent.cutoff",          "agent.layers",         "agent.hidden_neurons",      "agent.learning_rate",
      "agent.batch_size",      "agent.gamma",          "agent.capacity",            "agent.epsilon_max",
      "agent.epsilon_increment", "agent.target_refresh", "agent.cooling_rate",       "agent.initial_temperature",
      "agent.delta0",          "agent.mi",             "agent.l_sa",                "agent.l_ps",
      "agent.threshold",       "agent.update_magnitude", "agent.epsilon_reset_per_cycle", "agent.bernoulli_reward",
      "problem.family",        "problem.n",            "problem.n_clauses",         "problem.T",
      "problem.target",        "evolution.min_steps",  "evolution.max_doublings",   "evolution.renormalize",
      "run.seed",              "run.jobs",             "run.out"};
  return keys;
}

inline bool is_config_key(const std::string& key) {
  for (const auto& k : config_keys())
    if (k == key) return true;
  return false;
}

// Default step floor of the RK4 rule max(min_steps, ceil(20 T)).
inline int default_min_steps(ProblemFamily family) { return family == ProblemFamily::Sat3 ? 1'000 : 10'000; }

struct RunConfig {
  AgentConfig agent;
  ProblemSpec problem;
  int max_doublings = 3;
  bool renormalize = false;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: all cores
  std::filesystem::path out = "out";

  EvolutionSettings evolution() const {
    auto s = problem.evolution();
    s.max_doublings = max_doublings;
    s.renormalize = renormalize;
    return s;
  }

  // Resolved values of every key, as text.
  std::map<std::string, std::string> values() const {
    auto num = [](double v) { return format_number(v); };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    return {{"agent.cutoff", std::to_string(agent.cutoff)},
            {"agent.layers", std::to_string(agent.hidden_layers + 1)},
            {"agent.hidden_neurons", std::to_string(agent.hidden_neurons)},
            {"agent.learning_rate", num(agent.learning_rate)},
            {"agent.batch_size", std::to_string(agent.batch_size)},
            {"agent.gamma", num(agent.gamma)},
            {"agent.capacity", std::to_string(agent.capacity)},
            {"agent.epsilon_max", num(agent.epsilon_max)},
            {"agent.epsilon_increment", num(agent.epsilon_increment)},
            {"agent.target_refresh", std::to_string(agent.target_refresh)},
            {"agent.cooling_rate", num(agent.cooling_rate)},
            {"agent.initial_temperature", num(agent.initial_temperature)},
            {"agent.delta0", num(agent.delta0)},
            {"agent.mi", std::to_string(agent.mi)},
            {"agent.l_sa", std::to_string(agent.l_sa)},
            {"agent.l_ps", std::to_string(agent.l_ps)},
            {"agent.threshold", num(agent.threshold)},
            {"agent.update_magnitude", agent.update_magnitude == UpdateMagnitude::Sampled ? "sampled" : "fixed"},
            {"agent.epsilon_reset_per_cycle", flag(agent.epsilon_reset_per_cycle)},
            {"agent.bernoulli_reward", flag(agent.bernoulli_reward)},
            {"problem.family", to_string(problem.family)},
            {"problem.n", std::to_string(problem.n)},
            {"problem.n_clauses", std::to_string(problem.n_clauses)},
            {"problem.T", num(problem.total_time)},
            {"problem.target", std::to_string(problem.target)},
            {"evolution.min_steps", std::to_string(problem.min_steps)},
            {"evolution.max_doublings", std::to_string(max_doublings)},
            {"evolution.renormalize", flag(renormalize)},
            {"run.seed", std::to_string(seed)},
            {"run.jobs", std::to_string(jobs)},
            {"run.out", out.string()}};
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : values()) {
      const auto dot = key.find('.');
      j[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    return j;
  }
};

// One layer of "section.key" = value assignments.
using ConfigLayer = std::map<std::string, std::string>;

inline ConfigLayer load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string(), "config");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")",
                      "config");
  }
  ConfigLayer layer;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key \"" + section + "\" must be inside a section", section);
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      if (!is_config_key(full)) throw ConfigError("unknown config key \"" + full + "\"", full);
      layer[full] = value.get_value<std::string>();
    }
  }
  return layer;
}

// AQCRL_AGENT_GAMMA -> agent.gamma, for every recognised key that is set.
inline ConfigLayer environment_layer() {
  ConfigLayer layer;
  for (const auto& key : config_keys()) {
    std::string name = "AQCRL_";
    for (char c : key) name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(name.c_str())) layer[key] = v;
  }
  return layer;
}

// "section.key=value"
inline std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("expected section.key=value, got \"" + text + "\"", text);
  auto key = text.substr(0, eq);
  if (!is_config_key(key)) throw ConfigError("unknown config key \"" + key + "\"", key);
  return {key, text.substr(eq + 1)};
}

namespace detail {

template <class T>
T parse_value(const std::string& key, const std::string& text);

template <>
inline long long parse_value<long long>(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(key + ": expected an integer, got \"" + text + "\"", key);
  return v;
}

template <>
inline int parse_value<int>(const std::string& key, const std::string& text) {
  const auto v = parse_value<long long>(key, text);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(key + ": integer out of range", key);
  return static_cast<int>(v);
}

template <>
inline std::uint64_t parse_value<std::uint64_t>(const std::string& key, const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": expected a non-negative integer, got \"" + text + "\"", key);
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range", key);
  }
}

template <>
inline double parse_value<double>(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(key + ": expected a number, got \"" + text + "\"", key);
  return v;
}

template <>
inline bool parse_value<bool>(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got \"" + text + "\"", key);
}

}  // namespace detail

// Later layers win: resolve_config({file, env, cli}).
inline RunConfig resolve_config(const std::vector<ConfigLayer>& layers) {
  ConfigLayer merged;
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) merged[k] = v;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = merged.find(key); it != merged.end()) return it->second;
    return std::nullopt;
  };

  RunConfig rc;
  if (auto v = get("problem.family")) {
    try {
      rc.problem.family = problem_family_from_string(*v);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("problem.family: ") + e.what(), "problem.family");
    }
  }
  rc.agent = AgentConfig::for_problem(rc.problem.family);
  rc.problem.min_steps = default_min_steps(rc.problem.family);
  if (rc.problem.family == ProblemFamily::Sat3) {
    rc.problem.n = 10;
    rc.problem.total_time = 6.0;
  }

  auto set = [&](const std::string& key, auto& field) {
    using T = std::decay_t<decltype(field)>;
    if (auto v = get(key)) field = detail::parse_value<T>(key, *v);
  };
  auto& a = rc.agent;
  set("agent.cutoff", a.cutoff);
  if (auto v = get("agent.layers")) {
    const int layers = detail::parse_value<int>("agent.layers", *v);
    if (layers < 1) throw ConfigError("agent.layers must be at least 1", "agent.layers");
    a.hidden_layers = layers - 1;
  }
  set("agent.hidden_neurons", a.hidden_neurons);
  set("agent.learning_rate", a.learning_rate);
  set("agent.batch_size", a.batch_size);
  set("agent.gamma", a.gamma);
  set("agent.capacity", a.capacity);
  set("agent.epsilon_max", a.epsilon_max);
  set("agent.epsilon_increment", a.epsilon_increment);
  set("agent.target_refresh", a.target_refresh);
  set("agent.cooling_rate", a.cooling_rate);
  set("agent.initial_temperature", a.initial_temperature);
  set("agent.delta0", a.delta0);
  set("agent.mi", a.mi);
  set("agent.l_sa", a.l_sa);
  set("agent.l_ps", a.l_ps);
  set("agent.threshold", a.threshold);
  if (auto v = get("agent.update_magnitude")) {
    if (*v == "sampled") a.update_magnitude = UpdateMagnitude::Sampled;
    else if (*v == "fixed") a.update_magnitude = UpdateMagnitude::Fixed;
    else throw ConfigError("agent.update_magnitude must be sampled or fixed", "agent.update_magnitude");
  }
  set("agent.epsilon_reset_per_cycle", a.epsilon_reset_per_cycle);
  set("agent.bernoulli_reward", a.bernoulli_reward);
  set("problem.n", rc.problem.n);
  set("problem.n_clauses", rc.problem.n_clauses);
  set("problem.T", rc.problem.total_time);
  set("problem.target", rc.problem.target);
  set("evolution.min_steps", rc.problem.min_steps);
  set("evolution.max_doublings", rc.max_doublings);
  set("evolution.renormalize", rc.renormalize);
  set("run.seed", rc.seed);
  set("run.jobs", rc.jobs);
  if (auto v = get("run.out")) rc.out = *v;

  // Report range problems under the key that caused them.
  try {
    a.validate();
  } catch (const ParameterError& e) {
    std::string what = e.what();
    const std::string prefix = "agent parameter ";
    std::string field = "agent";
    if (what.rfind(prefix, 0) == 0) field = "agent." + what.substr(prefix.size(), what.find(' ', prefix.size()) - prefix.size());
    if (field == "agent.hidden_layers") field = "agent.layers";
    throw ConfigError(what, field);
  }
  if (!(rc.problem.total_time > 0.0)) throw ConfigError("problem.T must be positive", "problem.T");
  if (rc.problem.n < 1 || rc.problem.n > kMaxQubits)
    throw ConfigError("problem.n must lie in [1, " + std::to_string(kMaxQubits) + "]", "problem.n");
  if (rc.problem.family == ProblemFamily::Sat3 && rc.problem.n < 3)
    throw ConfigError("problem.n must be at least 3 for sat3", "problem.n");
  if (rc.problem.n_clauses < 1) throw ConfigError("problem.n_clauses must be positive", "problem.n_clauses");
  if (rc.problem.is_grover() && rc.problem.target >= (std::uint64_t{1} << rc.problem.n))
    throw ConfigError("problem.target must be below 2^n", "problem.target");
  if (rc.problem.min_steps < 1) throw ConfigError("evolution.min_steps must be positive", "evolution.min_steps");
  if (rc.max_doublings < 0) throw ConfigError("evolution.max_doublings must be non-negative", "evolution.max_doublings");
  return rc;
}

}  // namespace aqcrl
