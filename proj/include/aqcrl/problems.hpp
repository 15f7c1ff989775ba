#pragma once

// Problem encodings: easy and hard Grover search, random 3-SAT.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aqcrl/errors.hpp"
#include "aqcrl/quantum_core.hpp"
#include "aqcrl/rng.hpp"

namespace aqcrl {

enum class GroverVariant { Easy, Hard };

struct GroverInstance {
  int n_qubits = 1;
  std::uint64_t target = 0;
  GroverVariant variant = GroverVariant::Easy;

  void validate() const {
    const auto dim = dimension_for(n_qubits);
    if (target >= dim) throw ParameterError("Grover target must be below 2^n");
  }
};

// A 3-bit clause. It is satisfied by every assignment of its three bits
// except `excluded`, so its truth table always has 7 rows.
struct SatClause {
  std::array<int, 3> qubits{0, 1, 2};
  // excluded[k] is the forbidden value of bit qubits[k].
  std::array<std::uint8_t, 3> excluded{0, 0, 0};

  bool satisfied_by(std::uint64_t assignment) const {
    for (int k = 0; k < 3; ++k)
      if (((assignment >> qubits[k]) & 1u) != excluded[k]) return true;
    return false;
  }

  // Satisfying local assignments (z1, z2, z3) packed as z1 | z2 << 1 | z3 << 2.
  std::vector<std::uint8_t> truth_table() const {
    std::vector<std::uint8_t> rows;
    const std::uint8_t forbidden = excluded[0] | (excluded[1] << 1) | (excluded[2] << 2);
    for (std::uint8_t z = 0; z < 8; ++z)
      if (z != forbidden) rows.push_back(z);
    return rows;
  }

  std::string excluded_string() const {
    return {char('0' + excluded[0]), char('0' + excluded[1]), char('0' + excluded[2])};
  }
};

struct SatInstance {
  int n_bits = 3;
  std::vector<SatClause> clauses;

  int n_clauses() const { return static_cast<int>(clauses.size()); }

  void validate() const {
    if (n_bits < 3 || n_bits > kMaxQubits)
      throw ParameterError("3-SAT bit count must lie in [3, " + std::to_string(kMaxQubits) + "]");
    for (const auto& c : clauses) {
      for (int k = 0; k < 3; ++k) {
        if (c.qubits[k] < 0 || c.qubits[k] >= n_bits) throw ParameterError("clause references a bit out of range");
        if (c.excluded[k] > 1) throw ParameterError("clause excluded assignment must be binary");
      }
      if (c.qubits[0] == c.qubits[1] || c.qubits[0] == c.qubits[2] || c.qubits[1] == c.qubits[2])
        throw ParameterError("clause bits must be distinct");
    }
  }

  // Diagonal of H_P: entry(z) = -(number of clauses satisfied by z).
  std::vector<double> energies() const {
    const auto dim = dimension_for(n_bits);
    std::vector<double> e(dim, 0.0);
    for (std::uint64_t z = 0; z < dim; ++z) {
      int sat = 0;
      for (const auto& c : clauses) sat += c.satisfied_by(z) ? 1 : 0;
      e[z] = -static_cast<double>(sat);
    }
    return e;
  }
};

using ProblemInstance = std::variant<GroverInstance, SatInstance>;

inline HamiltonianPair build_hamiltonians(const GroverInstance& g) {
  g.validate();
  auto h_p = HamiltonianTerm::projector_complement(StateVector::basis_state(g.n_qubits, g.target));
  if (g.variant == GroverVariant::Easy)
    return {HamiltonianTerm::projector_complement(StateVector::uniform_superposition(g.n_qubits)), std::move(h_p)};
  return {HamiltonianTerm::transverse_field(g.n_qubits), std::move(h_p)};
}

inline HamiltonianPair build_hamiltonians(const SatInstance& sat) {
  sat.validate();
  return {HamiltonianTerm::transverse_field(sat.n_bits), HamiltonianTerm::diagonal(sat.n_bits, sat.energies())};
}

inline HamiltonianPair build_hamiltonians(const ProblemInstance& p) {
  return std::visit([](const auto& x) { return build_hamiltonians(x); }, p);
}

// Independent clauses, each on a uniformly random 3-subset of bits with a
// uniformly random excluded assignment. Repeated clauses are allowed.
inline SatInstance sample_sat_instance(int n_bits, int n_clauses, std::uint64_t seed) {
  if (n_bits < 3) throw ParameterError("3-SAT sampling needs at least 3 bits");
  if (n_clauses < 1) throw ParameterError("3-SAT sampling needs at least one clause");
  SatInstance inst;
  inst.n_bits = n_bits;
  inst.clauses.reserve(static_cast<std::size_t>(n_clauses));
  Rng rng(seed);
  std::vector<int> bits(static_cast<std::size_t>(n_bits));
  std::iota(bits.begin(), bits.end(), 0);
  std::uniform_int_distribution<int> form(0, 7);
  for (int i = 0; i < n_clauses; ++i) {
    SatClause c;
    std::array<int, 3> chosen{};
    std::sample(bits.begin(), bits.end(), chosen.begin(), 3, rng);
    c.qubits = chosen;
    const int f = form(rng);
    c.excluded = {static_cast<std::uint8_t>(f & 1), static_cast<std::uint8_t>((f >> 1) & 1),
                  static_cast<std::uint8_t>((f >> 2) & 1)};
    inst.clauses.push_back(c);
  }
  return inst;
}

inline constexpr int kMaxBruteForceBits = 24;

// All assignments satisfying every clause, ascending.
inline std::vector<std::uint64_t> solve_sat_brute_force(const SatInstance& sat) {
  if (sat.n_bits > kMaxBruteForceBits)
    throw CapabilityError("brute-force enumeration is limited to " + std::to_string(kMaxBruteForceBits) + " bits");
  if (sat.n_bits < 1) throw ParameterError("instance needs at least one bit");
  for (const auto& c : sat.clauses)
    for (int q : c.qubits)
      if (q < 0 || q >= sat.n_bits) throw ParameterError("clause references a bit out of range");
  std::vector<std::uint64_t> out;
  const std::uint64_t dim = std::uint64_t{1} << sat.n_bits;
  for (std::uint64_t z = 0; z < dim; ++z) {
    bool ok = true;
    for (const auto& c : sat.clauses)
      if (!c.satisfied_by(z)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(z);
  }
  return out;
}

struct SuccessProbability {
  double value = 0.0;
  bool unsatisfiable = false;  // no solution exists; value is defined as 0
};

inline SuccessProbability success_probability(const StateVector& final_state, const GroverInstance& g) {
  g.validate();
  if (final_state.n_qubits() != g.n_qubits) throw StructuralError("state and instance qubit counts differ");
  return {std::min(1.0, final_state.probability(g.target)), false};
}

// Uses the H_P diagonal: the solutions are exactly the entries equal to -N_C.
inline SuccessProbability success_probability(std::span<const Complex> final_state, const std::vector<double>& energies,
                                              int n_clauses) {
  if (final_state.size() != energies.size()) throw StructuralError("state and energy table lengths differ");
  const double ground = -static_cast<double>(n_clauses);
  double p = 0.0;
  bool any = false;
  for (std::size_t z = 0; z < energies.size(); ++z)
    if (energies[z] == ground) {
      any = true;
      p += std::norm(final_state[z]);
    }
  if (!any) return {0.0, true};
  return {std::min(1.0, p), false};
}

inline SuccessProbability success_probability(const StateVector& final_state, const SatInstance& sat) {
  sat.validate();
  if (final_state.n_qubits() != sat.n_bits) throw StructuralError("state and instance bit counts differ");
  return success_probability(final_state.amplitudes(), sat.energies(), sat.n_clauses());
}

inline SuccessProbability success_probability(const StateVector& final_state, const ProblemInstance& p) {
  return std::visit([&](const auto& x) { return success_probability(final_state, x); }, p);
}

// --- factorized 3-SAT evolution -------------------------------------------------

// Clauses grouped by the connected components of their shared bits, each
// relabelled onto bits 0..k-1 (in increasing original order). Bits that no
// clause touches are dropped.
//
// H_B and H_P are both sums over these components (plus free single-qubit
// terms that keep |+> stationary), and |psi_0> is a product state, so the
// evolution factorizes and the success probability is the product of the
// component success probabilities.
inline std::vector<SatInstance> sat_components(const SatInstance& sat) {
  sat.validate();
  const auto nb = static_cast<std::size_t>(sat.n_bits);
  std::vector<std::size_t> parent(nb);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<char> used(nb, 0);
  for (const auto& c : sat.clauses) {
    for (int q : c.qubits) used[static_cast<std::size_t>(q)] = 1;
    for (int k = 1; k < 3; ++k)
      parent[find(static_cast<std::size_t>(c.qubits[k]))] = find(static_cast<std::size_t>(c.qubits[0]));
  }

  std::vector<int> slot_of_root(nb, -1);
  std::vector<std::vector<int>> bits;  // original bits per component, ascending
  for (std::size_t q = 0; q < nb; ++q) {
    if (!used[q]) continue;
    int& slot = slot_of_root[find(q)];
    if (slot < 0) {
      slot = static_cast<int>(bits.size());
      bits.emplace_back();
    }
    bits[static_cast<std::size_t>(slot)].push_back(static_cast<int>(q));
  }
  std::vector<SatInstance> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i].n_bits = static_cast<int>(bits[i].size());
  for (const auto& c : sat.clauses) {
    const auto slot = static_cast<std::size_t>(slot_of_root[find(static_cast<std::size_t>(c.qubits[0]))]);
    const auto& local_bits = bits[slot];
    SatClause local = c;
    for (int k = 0; k < 3; ++k)
      local.qubits[k] = static_cast<int>(std::ranges::lower_bound(local_bits, c.qubits[k]) - local_bits.begin());
    out[slot].clauses.push_back(local);
  }
  return out;
}

// Success probability of the full instance from |psi_0>, evolved component by
// component. Matches evolving the whole 2^n_bits register up to integration error.
template <ScheduleFunction F>
SuccessProbability sat_success(const SatInstance& sat, const F& schedule, const EvolutionSettings& settings) {
  SuccessProbability total{1.0, false};
  for (const auto& part : sat_components(sat)) {
    const auto energies = part.energies();
    const HamiltonianPair pair(HamiltonianTerm::transverse_field(part.n_bits),
                               HamiltonianTerm::diagonal(part.n_bits, energies));
    const auto psi = evolve(pair, schedule, settings, StateVector::uniform_superposition(part.n_bits));
    const auto p = success_probability(psi.amplitudes(), energies, part.n_clauses());
    if (p.unsatisfiable) return {0.0, true};
    total.value *= p.value;
  }
  return total;
}

// --- serialization ------------------------------------------------------------

inline constexpr int kSatFormatVersion = 1;

inline nlohmann::json to_json(const SatInstance& sat) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : sat.clauses)
    clauses.push_back({{"qubits", {c.qubits[0], c.qubits[1], c.qubits[2]}}, {"excluded", c.excluded_string()}});
  return {{"format_version", kSatFormatVersion}, {"n_bits", sat.n_bits}, {"clauses", std::move(clauses)}};
}

inline SatInstance sat_instance_from_json(const nlohmann::json& j) {
  auto require = [&](const nlohmann::json& obj, const char* key) -> const nlohmann::json& {
    if (!obj.is_object() || !obj.contains(key))
      throw ParseError(std::string("SAT record is missing field \"") + key + "\"", 0, key);
    return obj.at(key);
  };
  SatInstance sat;
  try {
    sat.n_bits = require(j, "n_bits").get<int>();
    for (const auto& c : require(j, "clauses")) {
      SatClause clause;
      const auto& q = require(c, "qubits");
      if (!q.is_array() || q.size() != 3) throw ParseError("clause \"qubits\" must hold three indices", 0, "qubits");
      for (int k = 0; k < 3; ++k) clause.qubits[k] = q[k].get<int>();
      const auto ex = require(c, "excluded").get<std::string>();
      if (ex.size() != 3 || ex.find_first_not_of("01") != std::string::npos)
        throw ParseError("clause \"excluded\" must be a 3-character bit string", 0, "excluded");
      for (int k = 0; k < 3; ++k) clause.excluded[k] = static_cast<std::uint8_t>(ex[k] - '0');
      sat.clauses.push_back(clause);
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(std::string("SAT record has a field of the wrong type: ") + e.what());
  }
  sat.validate();
  return sat;
}

}  // namespace aqcrl
