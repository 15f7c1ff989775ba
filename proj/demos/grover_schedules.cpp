// Compare a linear sweep, the Roland-Cerf local-adiabatic sweep and a short
// agent-trained Fourier path on easy Grover search.

#include <cstdio>

#include "aqcrl/experiments.hpp"

int main() {
  using namespace aqcrl;

  ProblemSpec spec;
  spec.family = ProblemFamily::GroverEasy;
  spec.n = 4;
  spec.total_time = grover_reference_time(spec.n);

  std::printf("n=%d T=%.1f\n", spec.n, spec.total_time);
  std::printf("  linear       %.6f\n", evaluate_grover(Schedule::linear(), spec));
  std::printf("  roland-cerf  %.6f\n", evaluate_grover(Schedule::roland_cerf(spec.n), spec));

  TrainOptions opt;
  opt.problem = spec;
  opt.agent = AgentConfig::for_problem(spec.family);
  opt.agent.l_sa = 3;
  opt.agent.l_ps = 100;
  opt.seed = 7;
  opt.stop_at_threshold = true;
  const auto res = run_training(opt);

  std::printf("  trained      %.6f  b =", evaluate_grover(Schedule(res.best_path), spec));
  for (double b : res.best_path.coefficients()) std::printf(" %+.4f", b);
  std::printf("\n");
}
