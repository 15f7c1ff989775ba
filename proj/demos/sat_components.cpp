// A random 3-SAT instance, its independent clause groups and the success
// probability of a linear sweep.

#include <cstdio>

#include "aqcrl/problems.hpp"
#include "aqcrl/schedule.hpp"

int main() {
  using namespace aqcrl;

  const auto sat = sample_sat_instance(10, 4, 2024);
  for (const auto& c : sat.clauses)
    std::printf("clause on bits %d %d %d excludes %s\n", c.qubits[0], c.qubits[1], c.qubits[2], c.excluded_string().c_str());

  const auto parts = sat_components(sat);
  std::printf("%zu independent groups\n", parts.size());

  const auto p = sat_success(sat, Schedule::linear(), EvolutionSettings::for_time(6.0));
  std::printf("linear sweep, T=6: success %.6f%s\n", p.value, p.unsatisfiable ? " (unsatisfiable)" : "");
}
