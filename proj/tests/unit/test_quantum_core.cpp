#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aqcrl/problems.hpp"
#include "aqcrl/quantum_core.hpp"
#include "aqcrl/schedule.hpp"
#include "oracles/dense.hpp"

using namespace aqcrl;

namespace {

Amplitudes random_amplitudes(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Amplitudes v(dimension_for(n));
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

StateVector random_state(int n, std::uint64_t seed) { return StateVector::normalized(n, random_amplitudes(n, seed)); }

Eigen::VectorXcd as_eigen(std::span<const Complex> v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

HamiltonianPair easy(int n) { return build_hamiltonians(GroverInstance{n, 0, GroverVariant::Easy}); }
HamiltonianPair hard(int n) { return build_hamiltonians(GroverInstance{n, 0, GroverVariant::Hard}); }

std::vector<HamiltonianPair> sample_pairs() {
  return {easy(3), hard(3), build_hamiltonians(GroverInstance{4, 5, GroverVariant::Hard}),
          build_hamiltonians(sample_sat_instance(5, 4, 11))};
}

PathState random_path(std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> b(6);
  for (auto& x : b) x = u(rng);
  return PathState(b);
}

}  // namespace

TEST(StateVector, LengthIsTwoToTheN) {
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(StateVector::uniform_superposition(n).dimension(), std::size_t{1} << n);
  EXPECT_THROW(StateVector(2, Amplitudes(3, 0.5)), StructuralError);
}

TEST(StateVector, ConstructedStatesAreNormalized) {
  EXPECT_NEAR(StateVector::uniform_superposition(7).norm(), 1.0, 1e-12);
  EXPECT_NEAR(StateVector::basis_state(3, 5).norm(), 1.0, 0.0);
  EXPECT_NEAR(random_state(5, 1).norm(), 1.0, 1e-12);
  EXPECT_THROW(StateVector(1, Amplitudes{1.0, 1.0}), ParameterError);
  EXPECT_THROW(StateVector::basis_state(2, 4), ParameterError);
}

TEST(HamiltonianTerm, ProjectorPayloadMustBeUnit) {
  EXPECT_THROW(HamiltonianTerm::projector_complement(1, Amplitudes{1.0, 1.0}), ParameterError);
  EXPECT_THROW(HamiltonianTerm::diagonal(1, {0.0, std::nan("")}), ParameterError);
}

TEST(HamiltonianPair, TermsMustShareQubitCount) {
  EXPECT_THROW(HamiltonianPair(HamiltonianTerm::transverse_field(2), HamiltonianTerm::transverse_field(3)),
               StructuralError);
}

TEST(ApplyHamiltonian, GroundStatesOfEasyGroverEndpoints) {
  const auto pair = easy(4);
  for (const auto& z : apply_hamiltonian(pair, 0.0, StateVector::uniform_superposition(4))) EXPECT_NEAR(std::abs(z), 0.0, 1e-15);
  for (const auto& z : apply_hamiltonian(pair, 1.0, StateVector::basis_state(4, 0))) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(ApplyHamiltonian, HardGroverSingleQubitMatchesDense2x2) {
  // H_B = (1 - X)/2 = [[1/2, -1/2], [-1/2, 1/2]], H_P = 1 - |0><0| = diag(0, 1)
  const auto out = apply_hamiltonian(hard(1), 0.5, StateVector::basis_state(1, 0));
  EXPECT_NEAR(out[0].real(), 0.25, 1e-15);
  EXPECT_NEAR(out[1].real(), -0.25, 1e-15);
  EXPECT_EQ(out[0].imag(), 0.0);
}

TEST(ApplyHamiltonian, MatchesDenseMatrices) {
  const int n = 4;
  const std::vector<std::pair<HamiltonianPair, oracle::DensePair>> cases{
      {easy(n), oracle::easy_grover(n, 0)},
      {build_hamiltonians(GroverInstance{n, 9, GroverVariant::Hard}), oracle::hard_grover(n, 9)}};
  const auto psi = random_state(n, 3);
  for (const auto& [pair, dense] : cases)
    for (double s : {-0.7, 0.0, 0.3, 1.0, 2.5}) {
      const auto got = as_eigen(apply_hamiltonian(pair, s, psi));
      const Eigen::VectorXcd want = dense.at(s) * as_eigen(psi.amplitudes());
      EXPECT_LT((got - want).norm(), 1e-12) << "s=" << s;
    }
}

TEST(ApplyHamiltonian, DimensionMismatchIsStructural) {
  EXPECT_THROW(apply_hamiltonian(easy(3), 0.5, StateVector::uniform_superposition(2)), StructuralError);
  EXPECT_THROW(energy_expectation(easy(3), 0.5, StateVector::uniform_superposition(4)), StructuralError);
}

TEST(ApplyHamiltonianProperty, Linearity) {
  for (const auto& pair : sample_pairs()) {
    const int n = pair.n_qubits();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto a = random_amplitudes(n, 100 + seed), b = random_amplitudes(n, 200 + seed);
      Amplitudes sum(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
      const double s = -1.0 + 0.6 * seed;
      const auto ha = apply_hamiltonian(pair, s, a), hb = apply_hamiltonian(pair, s, b),
                 hsum = apply_hamiltonian(pair, s, sum);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(hsum[i] - ha[i] - hb[i]), 1e-12);
    }
  }
}

TEST(ApplyHamiltonianProperty, Hermiticity) {
  for (const auto& pair : sample_pairs()) {
    const int n = pair.n_qubits();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto phi = random_state(n, 300 + seed), psi = random_state(n, 400 + seed);
      const double s = 1.7 - 0.5 * seed;
      const Complex lhs = inner_product(phi.amplitudes(), apply_hamiltonian(pair, s, psi));
      const Complex rhs = std::conj(inner_product(psi.amplitudes(), apply_hamiltonian(pair, s, phi)));
      EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    }
  }
}

TEST(EnergyExpectation, Examples) {
  EXPECT_NEAR(energy_expectation(easy(5), 0.0, StateVector::uniform_superposition(5)), 0.0, 1e-15);
  EXPECT_NEAR(energy_expectation(easy(5), 1.0, StateVector::basis_state(5, 0)), 0.0, 1e-15);
  const auto sat = sample_sat_instance(6, 5, 2);
  const auto solutions = solve_sat_brute_force(sat);
  ASSERT_FALSE(solutions.empty());
  EXPECT_NEAR(energy_expectation(build_hamiltonians(sat), 1.0, StateVector::basis_state(6, solutions[0])), -5.0, 1e-12);
}

TEST(EnergyExpectation, MatchesDenseQuadraticForm) {
  for (int n = 1; n <= 6; ++n) {
    const auto psi = random_state(n, 500 + n);
    const auto dense = oracle::hard_grover(n, 0);
    const Eigen::VectorXcd v = as_eigen(psi.amplitudes());
    const double want = (v.adjoint() * dense.at(0.3) * v)(0, 0).real();
    EXPECT_NEAR(energy_expectation(hard(n), 0.3, psi), want, 1e-9);
  }
}

TEST(Evolve, EigenstateIsStationary) {
  const auto zero = [](double) { return 0.0; };
  const auto psi = evolve(easy(4), zero, EvolutionSettings::for_time(30.0), StateVector::uniform_superposition(4));
  const Complex overlap = inner_product(StateVector::uniform_superposition(4).amplitudes(), psi.amplitudes());
  EXPECT_NEAR(std::norm(overlap), 1.0, 1e-12);
}

TEST(Evolve, SingleQubitLinearMatchesTwoLevel) {
  const auto settings = EvolutionSettings::for_time(22.0);
  const auto lin = linear_schedule();
  const auto full = evolve(easy(1), lin, settings, StateVector::uniform_superposition(1));
  EXPECT_NEAR(full.probability(0), evolve_two_level(1, lin, settings).success_probability(), 1e-6);
}

TEST(Evolve, MatchesAdaptiveDenseIntegration) {
  const auto path = random_path(9, 0.15);
  const auto s = [&](double x) { return path(x); };
  for (auto [pair, dense, n] : {std::tuple{easy(3), oracle::easy_grover(3, 0), 3},
                                std::tuple{hard(3), oracle::hard_grover(3, 0), 3}}) {
    const auto psi = evolve(pair, path, EvolutionSettings::for_time(8.0), StateVector::uniform_superposition(n));
    const auto want = oracle::evolve(dense, s, 8.0, oracle::uniform(n));
    // The spectral shift only contributes a global phase.
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) overlap += std::conj(psi[i]) * want(static_cast<Eigen::Index>(i));
    const Complex phase = overlap / std::abs(overlap);
    for (std::size_t i = 0; i < psi.dimension(); ++i)
      EXPECT_LT(std::abs(psi[i] * phase - want(static_cast<Eigen::Index>(i))), 1e-8);
  }
}

TEST(Evolve, NormDriftBelowTarget) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = evolve_detailed(hard(4), random_path(seed, 0.2), EvolutionSettings::for_time(20.0),
                                   StateVector::uniform_superposition(4));
    EXPECT_LT(r.norm_drift, 1e-9);
    EXPECT_LT(std::abs(r.state.norm() - 1.0), 1e-9);
  }
}

TEST(Evolve, TooFewStepsIsAnIntegrationError) {
  // Wide spectrum, the minimum step count and no doublings.
  const auto pair = build_hamiltonians(sample_sat_instance(8, 40, 1));
  EvolutionSettings settings;
  settings.total_time = 6.0;
  settings.steps = EvolutionSettings::minimum_steps(6.0);
  settings.max_doublings = 0;
  EXPECT_THROW(evolve(pair, linear_schedule(), settings, StateVector::uniform_superposition(8)), IntegrationError);
}

TEST(Evolve, StepRuleAndScaling) {
  EXPECT_EQ(EvolutionSettings::for_time(22.0).steps, 10'000);
  EXPECT_EQ(EvolutionSettings::for_time(700.0).steps, 14'000);
  EvolutionSettings bad;
  bad.total_time = 100.0;
  bad.steps = 1999;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad.steps = 2000;
  bad.total_time = -1.0;
  EXPECT_THROW(bad.validate(), ParameterError);

  // A path inside [0, 1] keeps the base count; excursions raise it.
  const auto settings = EvolutionSettings::for_time(10.0);
  const auto init = StateVector::uniform_superposition(3);
  EXPECT_EQ(evolve_detailed(easy(3), linear_schedule(), settings, init).steps_used, settings.steps);
  const auto wild = PathState({3.0, 0, 0, 0, 0, 0});
  EXPECT_GT(evolve_detailed(easy(3), wild, settings, init).steps_used, 3 * settings.steps);
  EXPECT_GT(evolve_two_level(3, wild, settings).steps_used, 3 * settings.steps);
}

TEST(Evolve, RenormalizationIsOptIn) {
  auto settings = EvolutionSettings::for_time(5.0);
  settings.renormalize = true;
  const auto r = evolve_detailed(hard(3), random_path(1), settings, StateVector::uniform_superposition(3));
  EXPECT_NEAR(r.state.norm(), 1.0, 1e-14);
}

TEST(Evolve, SnapshotsCoverTheGrid) {
  const auto r = evolve_detailed(easy(2), linear_schedule(), EvolutionSettings::for_time(5.0),
                                 StateVector::uniform_superposition(2), 7);
  ASSERT_EQ(r.snapshots.size(), 8u);
  EXPECT_EQ(r.steps_used % 7, 0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.snapshots.back()[i], r.state[i]);
}

TEST(TwoLevel, StartsFromUniformOverlap) {
  // T -> 0 limit: the success probability is the initial overlap 1/N.
  EvolutionSettings settings;
  settings.total_time = 1e-9;
  settings.steps = 10;
  const auto zero = [](double) { return 0.0; };
  EXPECT_NEAR(evolve_two_level(1, zero, settings).success_probability(), 0.5, 1e-12);
}

TEST(TwoLevel, MatchesFullSimulationAtSixQubits) {
  const auto settings = EvolutionSettings::for_time(124.5);
  const auto lin = linear_schedule();
  const double full = evolve(easy(6), lin, settings, StateVector::uniform_superposition(6)).probability(0);
  EXPECT_NEAR(evolve_two_level(6, lin, settings).success_probability(), full, 1e-8);
}

TEST(TwoLevelProperty, EquivalentToFullSimulationUpToEightQubits) {
  const double times[] = {0, 22.0, 31.1, 40.0, 62.2, 90.0, 124.5, 180.0, 248.9};
  for (int n = 1; n <= 8; ++n) {
    const auto settings = EvolutionSettings::for_time(times[n]);
    const auto init = StateVector::uniform_superposition(n);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto path = random_path(40 + seed);
      EXPECT_NEAR(evolve_two_level(n, path, settings).success_probability(),
                  evolve(easy(n), path, settings, init).probability(0), 1e-6)
          << "n=" << n;
    }
  }
}

TEST(ExactSpectrum, EasyGroverGroundStateAtZero) {
  EXPECT_NEAR(exact_spectrum(easy(5), 0.0, 1)[0], 0.0, 1e-12);
}

TEST(ExactSpectrum, GapAtMidpointIsInverseSqrtN) {
  for (int n = 1; n <= 10; ++n) {
    const auto e = exact_spectrum(easy(n), 0.5, 2);
    EXPECT_NEAR(e[1] - e[0], std::pow(2.0, -0.5 * n), 1e-8) << "n=" << n;
    EXPECT_NEAR(e[1] - e[0], oracle::grover_gap(n, 0.5), 1e-8);
  }
}

TEST(ExactSpectrum, SatGroundEnergyDecidesSatisfiability) {
  int unsat = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto sat = sample_sat_instance(5, 18, seed);
    const double e0 = exact_spectrum(build_hamiltonians(sat), 1.0, 1)[0];
    const bool satisfiable = !solve_sat_brute_force(sat).empty();
    unsat += !satisfiable;
    EXPECT_EQ(std::abs(e0 + 18.0) < 1e-9, satisfiable);
  }
  EXPECT_GT(unsat, 0);
}

TEST(ExactSpectrum, RejectsLargeRegisters) {
  EXPECT_THROW(exact_spectrum(easy(13), 0.5, 2), CapabilityError);
  EXPECT_THROW(exact_spectrum(easy(2), 0.5, 0), ParameterError);
}

TEST(ExactSpectrumProperty, AscendingAndTwoLevelTrace) {
  for (int n = 2; n <= 7; ++n)
    for (double s : {0.0, 0.1, 0.37, 0.5, 0.8, 1.0}) {
      const auto e = exact_spectrum(easy(n), s, 4);
      for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LE(e[k - 1], e[k]);
      // The two-level block has trace 1, eigenvalues (1 -/+ g(s)) / 2.
      EXPECT_NEAR(e[0] + e[1], 1.0, 1e-9);
      EXPECT_NEAR(e[0], 0.5 * (1.0 - oracle::grover_gap(n, s)), 1e-9);
    }
}

TEST(ExactSpectrum, MatchesDenseOracle) {
  const auto sat = sample_sat_instance(4, 3, 8);
  std::vector<double> d(16);
  for (std::uint64_t z = 0; z < 16; ++z) {
    int count = 0;
    for (const auto& c : sat.clauses) {
      bool ok = false;
      for (int k = 0; k < 3; ++k) ok |= (((z >> c.qubits[k]) & 1u) != c.excluded[k]);
      count += ok;
    }
    d[z] = -count;
  }
  const oracle::DensePair dense{oracle::transverse_field(4), oracle::diagonal(d)};
  const auto want = oracle::eigenvalues(dense.at(0.4));
  const auto got = exact_spectrum(build_hamiltonians(sat), 0.4, 16);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(got[k], want[k], 1e-10);
}
