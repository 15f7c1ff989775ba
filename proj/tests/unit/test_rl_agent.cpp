#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "aqcrl/rl_agent.hpp"

using namespace aqcrl;

namespace {

std::vector<double> numeric_gradient(QNetwork net, const Eigen::MatrixXd& x, std::span<const int> a,
                                     std::span<const double> y, double h = 1e-6) {
  auto theta = net.parameters();
  std::vector<double> g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double keep = theta[k];
    theta[k] = keep + h;
    net.set_parameters(theta);
    const double up = td_loss(net, x, a, y);
    theta[k] = keep - h;
    net.set_parameters(theta);
    const double down = td_loss(net, x, a, y);
    theta[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

void expect_gradient_matches(const QNetwork& net, const Eigen::MatrixXd& x, std::vector<int> a, std::vector<double> y) {
  ParameterGradient g;
  td_loss(net, x, a, y, &g);
  const auto fd = numeric_gradient(net, x, a, y);
  ASSERT_EQ(g.size(), fd.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    EXPECT_LE(std::abs(g[k] - fd[k]), 1e-5 * std::max(std::abs(fd[k]), 1e-3)) << "parameter " << k;
}

}  // namespace

TEST(AgentConfig, FamilyDefaults) {
  const auto g = AgentConfig::for_problem(ProblemFamily::GroverEasy);
  EXPECT_EQ(g.layer_sizes(), (std::vector<int>{6, 20, 13}));
  EXPECT_EQ(g.capacity, 500);
  EXPECT_EQ(g.mi, 1);
  EXPECT_EQ(g.batch_size, 32);
  EXPECT_EQ(g.target_refresh, 50);
  EXPECT_DOUBLE_EQ(g.learning_rate, 0.01);
  EXPECT_DOUBLE_EQ(g.gamma, 0.9);
  EXPECT_DOUBLE_EQ(g.threshold, 0.999);
  EXPECT_DOUBLE_EQ(g.initial_temperature, 10.0);
  const auto s = AgentConfig::for_problem(ProblemFamily::Sat3);
  EXPECT_EQ(s.layer_sizes(), (std::vector<int>{6, 12, 12, 13}));
  EXPECT_EQ(s.capacity, 1000);
  EXPECT_EQ(s.mi, 100);
  AgentConfig bad;
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(QNetwork, ShapesAndInitialization) {
  Rng rng(1);
  const auto net = QNetwork::initialized({6, 20, 13}, rng);
  EXPECT_EQ(net.layers(), 2u);
  EXPECT_EQ(net.parameter_count(), 6u * 20 + 20 + 20 * 13 + 13);
  const double bound = 1.0 / std::sqrt(6.0);
  EXPECT_LE(net.weight(0).cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(q_forward(net, PathState::zeros(6)).size(), 13);
  EXPECT_THROW(q_forward(net, PathState::zeros(4)), StructuralError);
  EXPECT_THROW(QNetwork({6}), StructuralError);
}

TEST(QNetwork, ForwardMatchesHandComputation) {
  QNetwork net({2, 2, 1});
  net.weight(0) << 1.0, -1.0, 0.5, 2.0;
  net.bias(0) << 0.0, -3.0;
  net.weight(1) << 2.0, 1.0;
  net.bias(1) << 0.25;
  // hidden = relu([1-2, 0.5+4-3]) = [0, 1.5]; out = 1.5 + 0.25
  EXPECT_DOUBLE_EQ(net.forward(std::vector<double>{1.0, 2.0})(0), 1.75);
}

TEST(TdLoss, GradientOfThreeParameterNetwork) {
  QNetwork net({2, 1});
  net.weight(0) << 0.3, -0.7;
  net.bias(0) << 0.1;
  Eigen::MatrixXd x(2, 3);
  x << 0.5, -1.0, 2.0, 1.5, 0.25, -0.5;
  expect_gradient_matches(net, x, {0, 0, 0}, {1.0, -0.5, 0.2});
}

TEST(TdLoss, GradientOfHiddenLayerNetworks) {
  Rng rng(3);
  std::normal_distribution<double> gauss;
  for (const auto& sizes : {std::vector<int>{6, 20, 13}, std::vector<int>{6, 12, 12, 13}}) {
    const auto net = QNetwork::initialized(sizes, rng);
    Eigen::MatrixXd x(6, 8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
    std::vector<int> a{0, 3, 12, 7, 7, 1, 9, 4};
    std::vector<double> y{0.1, 0.9, -0.3, 0.5, 0.4, 1.2, 0.0, -1.0};
    expect_gradient_matches(net, x, a, y);
  }
}

TEST(TdLoss, RejectsMismatchedBatches) {
  QNetwork net({2, 1});
  Eigen::MatrixXd x(2, 2);
  x.setZero();
  std::vector<int> a{0};
  std::vector<double> y{0.0, 1.0};
  EXPECT_THROW(td_loss(net, x, a, y), StructuralError);
  std::vector<int> a2{0, 1};
  EXPECT_THROW(td_loss(net, x, a2, y), StructuralError);
}

TEST(TrainStep, ConvergesOnASingleTransition) {
  Rng rng(5);
  auto net = QNetwork::initialized({6, 20, 13}, rng);
  const QNetwork target = net;
  AgentConfig cfg;
  cfg.batch_size = 1;
  ReplayMemory mem(1);
  mem.push({{0.1, 0, -0.1, 0, 0, 0}, 4, 0.8, {0.1, 0, -0.1, 0.1, 0, 0}});
  const double first = *train_step(net, target, mem, cfg, rng);
  double prev = first;
  for (int k = 1; k < 500; ++k) {
    const double loss = *train_step(net, target, mem, cfg, rng);
    if (k > 50) EXPECT_LE(loss, prev * (1 + 1e-12)) << "step " << k;
    prev = loss;
  }
  EXPECT_LT(prev, 1e-6 * first);
}

TEST(TrainStep, NoUpdateUntilBatchIsAvailable) {
  Rng rng(6);
  auto net = QNetwork::initialized({6, 20, 13}, rng);
  const auto before = net.parameters();
  ReplayMemory mem(100);
  for (int k = 0; k < 31; ++k) mem.push({std::vector<double>(6, 0.0), 1, 0.5, std::vector<double>(6, 0.0)});
  EXPECT_FALSE(train_step(net, net, mem, AgentConfig{}, rng));
  EXPECT_EQ(net.parameters(), before);
}

TEST(TrainStep, RecoversTabularBellmanFixedPoint) {
  // Two states one-hot encoded, two actions, deterministic rewards.
  //   A --0--> A (r=0)   A --1--> B (r=1)
  //   B --0--> A (r=0.5) B --1--> B (r=0)
  // With gamma = 0.9 the optimal policy is A:1, B:0, so
  //   V(A) = 1 + 0.9 V(B), V(B) = 0.5 + 0.9 V(A).
  const double va = 1.45 / 0.19, vb = 0.5 + 0.9 * va;
  const std::map<std::pair<int, int>, double> qstar{
      {{0, 0}, 0.9 * va}, {{0, 1}, 1.0 + 0.9 * vb}, {{1, 0}, 0.5 + 0.9 * va}, {{1, 1}, 0.9 * vb}};
  const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  ReplayMemory mem(4);
  mem.push({a, 0, 0.0, a});
  mem.push({a, 1, 1.0, b});
  mem.push({b, 0, 0.5, a});
  mem.push({b, 1, 0.0, b});
  AgentConfig cfg;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.1;
  Rng rng(7);
  QNetwork net({2, 2});
  QNetwork target = net;
  for (int k = 0; k < 20000; ++k) {
    train_step(net, target, mem, cfg, rng);
    if ((k + 1) % 20 == 0) refresh_target(net, target);
  }
  for (int s = 0; s < 2; ++s) {
    const auto q = net.forward(s == 0 ? a : b);
    for (int act = 0; act < 2; ++act) EXPECT_NEAR(q(act), qstar.at({s, act}), 1e-3) << s << "," << act;
  }
}

TEST(RefreshTarget, CopiesAndChecksShape) {
  Rng rng(8);
  const auto net = QNetwork::initialized({6, 20, 13}, rng);
  QNetwork target({6, 20, 13});
  refresh_target(net, target);
  EXPECT_EQ(target.parameters(), net.parameters());
  QNetwork other({6, 12, 13});
  EXPECT_THROW(refresh_target(net, other), StructuralError);
}

TEST(ReplayMemory, EvictsOldestFirst) {
  ReplayMemory mem(3);
  for (int k = 0; k < 5; ++k) mem.push({{double(k)}, k, 0.0, {double(k)}});
  EXPECT_EQ(mem.size(), 3u);
  const auto all = mem.ordered();
  EXPECT_EQ(all[0].action, 2);
  EXPECT_EQ(all[2].action, 4);
  EXPECT_THROW(mem.at(3), ParameterError);
  EXPECT_THROW(ReplayMemory(0), ParameterError);
}

TEST(ReplayMemory, UndoPushRestoresPreviousContents) {
  ReplayMemory mem(3);
  for (int k = 0; k < 2; ++k) mem.push({{0.0}, k, 0.0, {0.0}});
  auto ev = mem.push({{0.0}, 2, 0.0, {0.0}});
  EXPECT_FALSE(ev);
  mem.undo_push(ev);
  EXPECT_EQ(mem.size(), 2u);
  mem.push({{0.0}, 2, 0.0, {0.0}});
  const auto before = mem.ordered();
  for (int k = 3; k < 8; ++k) {
    const auto snapshot = mem.ordered();
    auto evicted = mem.push({{0.0}, k, 0.0, {0.0}});
    ASSERT_TRUE(evicted);
    EXPECT_EQ(evicted->action, snapshot.front().action);
    mem.undo_push(evicted);
    EXPECT_EQ(mem.ordered(), snapshot);
    mem.push({{0.0}, k, 0.0, {0.0}});
  }
  EXPECT_EQ(mem.ordered().front().action, 5);
}

TEST(ReplayMemory, SamplesDistinctUniformly) {
  ReplayMemory mem(10);
  for (int k = 0; k < 10; ++k) mem.push({{0.0}, k, 0.0, {0.0}});
  Rng rng(9);
  std::vector<int> counts(10, 0);
  const int draws = 20000;
  for (int d = 0; d < draws; ++d) {
    const auto batch = mem.sample(3, rng);
    ASSERT_EQ(batch.size(), 3u);
    EXPECT_NE(batch[0], batch[1]);
    EXPECT_NE(batch[1], batch[2]);
    EXPECT_NE(batch[0], batch[2]);
    for (const auto* t : batch) ++counts[static_cast<std::size_t>(t->action)];
  }
  const double expect = draws * 3 / 10.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_LT(chi2, 27.88);  // df 9, p = 0.001
  EXPECT_TRUE(mem.sample(11, rng).empty());
}

TEST(SelectAction, UniformAtZeroEpsilon) {
  Rng rng(10);
  std::vector<double> q(13, 0.0);
  q[4] = 5.0;
  std::vector<int> counts(13, 0);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) ++counts[static_cast<std::size_t>(select_action(q, 0.0, rng).index)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - draws / 13.0) * (c - draws / 13.0) / (draws / 13.0);
  EXPECT_LT(chi2, 32.91);  // df 12, p = 0.001
}

TEST(SelectAction, GreedyFrequencyAtHighEpsilon) {
  Rng rng(11);
  std::vector<double> q(13, 0.0);
  q[7] = 1.0;
  const int draws = 100000;
  int greedy = 0;
  for (int d = 0; d < draws; ++d) greedy += select_action(q, 0.9, rng).index == 7;
  const double p = 0.9 + 0.1 / 13.0;
  EXPECT_NEAR(greedy / double(draws), p, 3 * std::sqrt(p * (1 - p) / draws));
  EXPECT_EQ(select_action(q, 1.0, rng).index, 7);
  EXPECT_THROW(select_action(q, 1.5, rng), ParameterError);
}

TEST(SelectAction, TiesGoToLowestIndex) {
  Rng rng(12);
  std::vector<double> q{0.0, 2.0, 2.0, 1.0};
  for (int k = 0; k < 100; ++k) EXPECT_EQ(select_action(q, 1.0, rng).index, 1);
}

TEST(Acceptance, EnergyAndRates) {
  EXPECT_DOUBLE_EQ(acceptance_energy(1.0, 1.5, 0.05, 0.1), 0.25);
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) EXPECT_TRUE(acceptance_decision(1.0, 1.2, 0.03, 0.1, 10.0, rng));
  // e = -Tem gives acceptance probability exp(-1).
  const int draws = 100000;
  int accepted = 0;
  for (int d = 0; d < draws; ++d) accepted += acceptance_decision(1.0, -1.0, 0.1, 0.1, 2.0, rng);
  const double p = std::exp(-1.0);
  EXPECT_NEAR(accepted / double(draws), p, 3 * std::sqrt(p * (1 - p) / draws));
  EXPECT_THROW(acceptance_decision(1.0, 1.0, 0.1, 0.1, 0.0, rng), ParameterError);
  EXPECT_THROW(acceptance_decision(1.0, 1.0, 0.2, 0.1, 1.0, rng), ParameterError);
}

TEST(ComputeReward, GroverMatchesTwoLevelEvolution) {
  ProblemSpec spec;
  spec.n = 1;
  spec.total_time = 22.0;
  const auto cfg = AgentConfig::for_problem(ProblemFamily::GroverEasy);
  const auto r = compute_reward(PathState::zeros(6), spec, cfg, 1, 0);
  const auto direct = evolve_two_level(1, linear_schedule(), spec.evolution()).success_probability();
  EXPECT_NEAR(r.reward, direct, 1e-12);
  EXPECT_EQ(r.unsatisfiable, 0);
  EXPECT_GT(r.reward, 0.99);
  EXPECT_LE(r.reward, 1.0);
}

TEST(ComputeReward, HardGroverIgnoresRunSeed) {
  ProblemSpec spec;
  spec.family = ProblemFamily::GroverHard;
  spec.n = 3;
  spec.total_time = 20.0;
  const auto cfg = AgentConfig::for_problem(ProblemFamily::GroverHard);
  const auto a = compute_reward(PathState::zeros(6), spec, cfg, 1, 0);
  const auto b = compute_reward(PathState::zeros(6), spec, cfg, 2, 9);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_GT(a.reward, 0.0);
  EXPECT_LE(a.reward, 1.0);
}

TEST(ComputeReward, SatIsDeterministicPerStep) {
  ProblemSpec spec;
  spec.family = ProblemFamily::Sat3;
  spec.n = 6;
  spec.n_clauses = 3;
  spec.total_time = 6.0;
  spec.min_steps = 1000;
  auto cfg = AgentConfig::for_problem(ProblemFamily::Sat3);
  cfg.mi = 10;
  const PathState b({0.05, 0, 0, 0, 0, 0});
  const auto r1 = compute_reward(b, spec, cfg, 42, 3);
  const auto r2 = compute_reward(b, spec, cfg, 42, 3, 2);
  const auto r3 = compute_reward(b, spec, cfg, 42, 4);
  EXPECT_EQ(r1.reward, r2.reward);
  EXPECT_NE(r1.reward, r3.reward);
  EXPECT_GE(r1.reward, 0.0);
  EXPECT_LE(r1.reward, 1.0);
}

TEST(ComputeReward, BernoulliRewardIsBinaryAverage) {
  ProblemSpec spec;
  spec.n = 2;
  spec.total_time = 5.0;
  auto cfg = AgentConfig::for_problem(ProblemFamily::GroverEasy);
  cfg.bernoulli_reward = true;
  cfg.mi = 8;
  const auto r = compute_reward(PathState::zeros(6), spec, cfg, 1, 0);
  const double scaled = r.reward * 8;
  EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
}

TEST(Serialization, NetworkAndTransitionRoundTrip) {
  Rng rng(14);
  const auto net = QNetwork::initialized({6, 12, 12, 13}, rng);
  const auto back = network_from_json(nlohmann::json::parse(to_json(net).dump()));
  EXPECT_EQ(back.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(back.parameters(), net.parameters());
  const Transition t{{0.1, 1.0 / 3.0}, 5, 0.123456789012345678, {0.2, -1e-300}};
  EXPECT_EQ(transition_from_json(nlohmann::json::parse(to_json(t).dump())), t);
  auto j = to_json(net);
  j["parameters"].erase(0);
  EXPECT_ANY_THROW(network_from_json(j));
}
