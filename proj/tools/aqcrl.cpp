// aqcrl: train, evaluate and analyse annealing schedules from the command line.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
// 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "aqcrl/artifacts.hpp"
#include "aqcrl/config.hpp"
#include "aqcrl/experiments.hpp"

#ifndef AQCRL_VERSION
#define AQCRL_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace aqcrl;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Options shared by every subcommand; shortcuts land in the command-line layer.
struct CommonOptions {
  std::string config_file;
  std::vector<std::string> assignments;
  std::optional<std::string> problem;
  std::optional<int> n;
  std::optional<int> n_clauses;
  std::optional<double> total_time;
  std::optional<int> mi;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<int> l_sa;
  std::optional<int> l_ps;
  std::optional<int> min_steps;
  bool bernoulli = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "INI configuration file");
    cmd->add_option("--set", assignments, "Override a key: section.key=value (repeatable)");
    cmd->add_option("--problem", problem, "grover-easy | grover-hard | sat3");
    cmd->add_option("--n,--n-bits", n, "Qubits (Grover) or bits (3-SAT)");
    cmd->add_option("--n-clauses", n_clauses, "3-SAT clause count");
    cmd->add_option("--T", total_time, "Total annealing time");
    cmd->add_option("--mi", mi, "Instances averaged per reward");
    cmd->add_option("--seed", seed, "Run seed");
    cmd->add_option("--jobs", jobs, "Worker threads (0: all cores)");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--l-sa", l_sa, "Annealing cycles");
    cmd->add_option("--l-ps", l_ps, "Path-state iterations per cycle");
    cmd->add_option("--min-steps", min_steps, "Floor of the RK4 step count");
    cmd->add_flag("--bernoulli-reward", bernoulli, "Sample 0/1 rewards instead of probabilities");
  }

  ConfigLayer cli_layer() const {
    ConfigLayer layer;
    for (const auto& a : assignments) {
      auto [key, value] = parse_assignment(a);
      layer.insert_or_assign(std::move(key), std::move(value));
    }
    auto put = [&](const char* key, const auto& opt) {
      if (!opt) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>)
        layer[key] = *opt;
      else if constexpr (std::is_floating_point_v<std::decay_t<decltype(*opt)>>)
        layer[key] = format_number(*opt);
      else
        layer[key] = std::to_string(*opt);
    };
    put("problem.family", problem);
    put("problem.n", n);
    put("problem.n_clauses", n_clauses);
    put("problem.T", total_time);
    put("agent.mi", mi);
    put("run.seed", seed);
    put("run.jobs", jobs);
    put("run.out", out);
    put("agent.l_sa", l_sa);
    put("agent.l_ps", l_ps);
    put("evolution.min_steps", min_steps);
    if (bernoulli) layer["agent.bernoulli_reward"] = "true";
    return layer;
  }

  // defaults < base (e.g. a schedule record) < file < environment < command line
  RunConfig resolve(const ConfigLayer& base = {}) const {
    std::vector<ConfigLayer> layers{base};
    if (!config_file.empty()) layers.push_back(load_config_file(config_file));
    layers.push_back(environment_layer());
    layers.push_back(cli_layer());
    return resolve_config(layers);
  }
};

ScheduleRecord read_schedule_record(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("schedule file not found: " + path.string(), "schedule");
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  return deserialize_schedule(text.str());
}

bool is_builtin_schedule(const std::string& s) { return s == "linear" || s == "roland-cerf"; }

// Problem keys implied by a schedule record.
ConfigLayer record_layer(const ScheduleRecord& r) {
  ConfigLayer layer;
  if (r.problem == "sat3") {
    layer["problem.family"] = "sat3";
    if (r.n_clauses) layer["problem.n_clauses"] = std::to_string(*r.n_clauses);
  } else {
    layer["problem.family"] = r.variant == "hard" ? "grover-hard" : "grover-easy";
  }
  layer["problem.n"] = std::to_string(r.n);
  layer["problem.T"] = format_number(r.total_time);
  layer["agent.cutoff"] = std::to_string(r.path.cutoff());
  return layer;
}

ScheduleRecord make_record(const RunConfig& rc, const PathState& path) {
  ScheduleRecord r;
  r.problem = rc.problem.family == ProblemFamily::Sat3 ? "sat3" : "grover";
  r.variant = rc.problem.family == ProblemFamily::GroverEasy ? "easy"
              : rc.problem.family == ProblemFamily::GroverHard ? "hard"
                                                               : "";
  r.n = rc.problem.n;
  r.total_time = rc.problem.total_time;
  r.path = path;
  if (rc.problem.family == ProblemFamily::Sat3) r.n_clauses = rc.problem.n_clauses;
  r.seed = rc.seed;
  return r;
}

Schedule make_schedule(const std::string& spec, const RunConfig& rc) {
  if (spec == "linear") return Schedule::linear(rc.agent.cutoff);
  if (spec == "roland-cerf") {
    if (rc.problem.family != ProblemFamily::GroverEasy)
      throw ConfigError("the roland-cerf schedule is defined for grover-easy only", "schedule");
    return Schedule::roland_cerf(rc.problem.n);
  }
  return Schedule(read_schedule_record(spec).path);
}

std::string schedule_kind(const std::string& spec) { return is_builtin_schedule(spec) ? spec : "rl"; }

std::pair<int, int> parse_range(const std::string& text, const char* field) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError(std::string(field) + ": expected N or LO..HI, got \"" + text + "\"", field);
  }
}

class Manifest {
 public:
  Manifest(std::string command, const RunConfig& rc) {
    j_ = {{"format_version", kArtifactFormatVersion},
          {"tool", "aqcrl"},
          {"version", AQCRL_VERSION},
          {"command", std::move(command)},
          {"seed", rc.seed},
          {"config", rc.to_json()},
          {"inputs", nlohmann::json::object()},
          {"artifacts", nlohmann::json::array()},
          {"results", nlohmann::json::object()}};
    dir_ = rc.out;
    fs::create_directories(dir_);
    flush();  // the resolved config is on disk before any work starts
  }

  void input(const std::string& key, const std::string& value) { j_["inputs"][key] = value; }
  void artifact(const std::string& file, const std::vector<std::string>& cols = {}) {
    nlohmann::json a = {{"file", file}, {"format_version", kArtifactFormatVersion}};
    if (!cols.empty()) a["columns"] = cols;
    j_["artifacts"].push_back(std::move(a));
  }
  nlohmann::json& results() { return j_["results"]; }
  fs::path path(const std::string& file) const { return dir_ / file; }
  void flush() const { write_json(dir_ / "manifest.json", j_); }

 private:
  nlohmann::json j_;
  fs::path dir_;
};

// --- train --------------------------------------------------------------------

struct TrainArgs {
  std::string resume;
  std::string init_schedule;
  std::string init_checkpoint;
  bool stop_at_threshold = false;
  int checkpoint_every = 1;
  long max_steps = 0;
};

int cmd_train(const CommonOptions& common, const TrainArgs& args) {
  const RunConfig rc = common.resolve();
  Manifest manifest("train", rc);
  TrainOptions opt;
  opt.agent = rc.agent;
  opt.problem = rc.problem;
  opt.seed = rc.seed;
  opt.jobs = rc.jobs;
  opt.stop_at_threshold = args.stop_at_threshold;
  if (args.max_steps < 0) throw ConfigError("--max-steps must be non-negative", "max_steps");
  if (args.max_steps > 0) opt.stop_when = [limit = args.max_steps](const AgentState& st) { return st.step >= limit; };
  if (!args.init_schedule.empty()) {
    opt.initial_path = read_schedule_record(args.init_schedule).path;
    manifest.input("init_schedule", args.init_schedule);
  }
  if (!args.init_checkpoint.empty()) {
    if (!fs::exists(args.init_checkpoint))
      throw ConfigError("checkpoint not found: " + args.init_checkpoint, "init_checkpoint");
    auto source = agent_state_from_json(read_json(args.init_checkpoint));
    opt.initial_network = std::move(source.net);
    if (!opt.initial_path) opt.initial_path = std::move(source.best_path);
    manifest.input("init_checkpoint", args.init_checkpoint);
  }
  const auto checkpoint_file = manifest.path("checkpoint.json");
  opt.checkpoint_every = args.checkpoint_every;
  opt.on_checkpoint = [&](const AgentState& st) { write_json(checkpoint_file, to_json(st)); };

  std::optional<AgentState> resume;
  if (!args.resume.empty()) {
    if (!fs::exists(args.resume)) throw ConfigError("checkpoint not found: " + args.resume, "resume");
    resume = agent_state_from_json(read_json(args.resume));
    manifest.input("resume", args.resume);
  }
  manifest.flush();

  const auto res = run_training(opt, std::move(resume));
  write_json(checkpoint_file, to_json(res.state));
  write_json(manifest.path("schedule.json"), to_json(make_record(rc, res.best_path)));
  write_json(manifest.path("schedule_final.json"), to_json(make_record(rc, res.final_path)));
  write_trace_csv(manifest.path("trace.csv"), res.state.trace, rc.agent.cutoff);
  manifest.artifact("schedule.json");
  manifest.artifact("schedule_final.json");
  manifest.artifact("checkpoint.json");
  auto trace_cols = columns::trace;
  for (int m = 1; m <= rc.agent.cutoff; ++m) trace_cols.push_back("b" + std::to_string(m));
  manifest.artifact("trace.csv", trace_cols);
  manifest.results() = {{"best_reward", res.best_reward},
                        {"threshold_step", res.threshold_step ? nlohmann::json(*res.threshold_step) : nlohmann::json()},
                        {"reward_evaluations", res.reward_evaluations},
                        {"updates", res.updates}};
  manifest.flush();
  std::printf("best reward %.6f after %ld reward evaluations", res.best_reward, res.reward_evaluations);
  if (res.threshold_step) std::printf(", threshold reached at step %ld", *res.threshold_step);
  std::printf("\n");
  return 0;
}

// --- eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string schedule = "linear";
  int samples = 10'000;
  std::string clauses;
};

int cmd_eval(const CommonOptions& common, const EvalArgs& args) {
  ConfigLayer base;
  if (!is_builtin_schedule(args.schedule)) base = record_layer(read_schedule_record(args.schedule));
  const RunConfig rc = common.resolve(base);
  Manifest manifest("eval", rc);
  manifest.input("schedule", args.schedule);
  const Schedule schedule = make_schedule(args.schedule, rc);
  const auto kind = schedule_kind(args.schedule);

  if (rc.problem.is_grover()) {
    const double p = evaluate_grover(schedule, rc.problem);
    CsvWriter w(manifest.path("fidelity.csv"), columns::fidelity);
    w.cell(rc.problem.n).cell(rc.problem.total_time).cell(kind).cell(p).end_row();
    manifest.artifact("fidelity.csv", columns::fidelity);
    manifest.results() = {{"success_probability", p}};
    manifest.flush();
    std::printf("success probability %.10f\n", p);
    return 0;
  }

  const auto [lo, hi] = args.clauses.empty() ? std::pair{rc.problem.n_clauses, rc.problem.n_clauses}
                                             : parse_range(args.clauses, "clauses");
  CsvWriter summary(manifest.path("sat_success.csv"), columns::sat_success);
  CsvWriter per(manifest.path("sat_instances.csv"), columns::sat_instances);
  for (int nc = lo; nc <= hi; ++nc) {
    ProblemSpec spec = rc.problem;
    spec.n_clauses = nc;
    const auto ev = evaluate_sat(schedule, spec, args.samples, rc.seed, rc.jobs);
    summary.cell(spec.n).cell(nc).cell(spec.total_time).cell(kind).cell(args.samples).cell(ev.unsatisfiable_count);
    summary.cell(ev.mean).cell(ev.bootstrap_se).end_row();
    for (std::size_t k = 0; k < ev.success.size(); ++k)
      per.cell(nc).cell(static_cast<long>(k)).cell(ev.success[k]).cell(int{ev.unsatisfiable[k]}).end_row();
    std::printf("N_C=%d mean success %.6f +- %.6f (%d unsatisfiable)\n", nc, ev.mean, ev.bootstrap_se,
                ev.unsatisfiable_count);
  }
  manifest.artifact("sat_success.csv", columns::sat_success);
  manifest.artifact("sat_instances.csv", columns::sat_instances);
  manifest.flush();
  return 0;
}

// --- baseline ----------------------------------------------------------------------

struct BaselineArgs {
  std::string kind = "all";
  std::vector<int> n_list{1, 2, 4, 6, 8, 10};
};

int cmd_baseline(const CommonOptions& common, const BaselineArgs& args) {
  const RunConfig rc = common.resolve();
  if (!rc.problem.is_grover()) throw ConfigError("baseline covers the Grover problems", "problem.family");
  std::vector<std::string> kinds;
  if (args.kind == "all") {
    kinds = {"linear"};
    if (rc.problem.family == ProblemFamily::GroverEasy) kinds.push_back("roland-cerf");
  } else if (is_builtin_schedule(args.kind)) {
    kinds = {args.kind};
  } else {
    throw ConfigError("--kind must be linear, roland-cerf or all", "kind");
  }
  Manifest manifest("baseline", rc);
  CsvWriter w(manifest.path("fidelity.csv"), columns::fidelity);
  // An explicit --T applies to a single n; otherwise the reference times are used.
  const bool fixed_time = common.total_time.has_value();
  std::vector<int> ns = args.n_list;
  if (common.n) ns = {*common.n};
  for (int n : ns) {
    RunConfig at = rc;
    at.problem.n = n;
    at.problem.total_time = fixed_time ? rc.problem.total_time : grover_reference_time(n);
    for (const auto& kind : kinds) {
      const double p = evaluate_grover(make_schedule(kind, at), at.problem);
      w.cell(n).cell(at.problem.total_time).cell(kind).cell(p).end_row();
      std::printf("n=%d T=%g %s success %.8f\n", n, at.problem.total_time, kind.c_str(), p);
    }
  }
  manifest.artifact("fidelity.csv", columns::fidelity);
  manifest.flush();
  return 0;
}

// --- spectrum ---------------------------------------------------------------------

struct SpectrumArgs {
  std::string schedule;
  int grid = 101;
  std::optional<std::uint64_t> instance_seed;
};

int cmd_spectrum(const CommonOptions& common, const SpectrumArgs& args) {
  ConfigLayer base;
  if (!is_builtin_schedule(args.schedule)) base = record_layer(read_schedule_record(args.schedule));
  const RunConfig rc = common.resolve(base);
  Manifest manifest("spectrum", rc);
  manifest.input("schedule", args.schedule);
  const std::uint64_t instance_seed = args.instance_seed.value_or(derive_seed(rc.seed, {0x5BULL}));
  const auto [pair, initial] = problem_setup(rc.problem, instance_seed);
  const auto settings = rc.evolution();

  const auto linear = spectrum_trace(pair, Schedule::linear(rc.agent.cutoff), settings, initial, args.grid);
  const auto rl = spectrum_trace(pair, make_schedule(args.schedule, rc), settings, initial, args.grid);
  std::optional<std::vector<SpectrumPoint>> nonlinear;
  if (rc.problem.family == ProblemFamily::GroverEasy)
    nonlinear = spectrum_trace(pair, Schedule::roland_cerf(rc.problem.n), settings, initial, args.grid);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  CsvWriter w(manifest.path("spectrum.csv"), columns::spectrum);
  CsvWriter s(manifest.path("schedule.csv"), columns::schedule_curve);
  for (int k = 0; k < args.grid; ++k) {
    const auto& l = linear[static_cast<std::size_t>(k)];
    const auto& r = rl[static_cast<std::size_t>(k)];
    const SpectrumPoint none{l.x, nan, nan, nan, nan};
    const auto& nl = nonlinear ? (*nonlinear)[static_cast<std::size_t>(k)] : none;
    w.cell(l.x).cell(l.e0).cell(l.e1).cell(l.e_dyn).cell(r.e_dyn).cell(nl.e_dyn);
    w.cell(l.s).cell(r.s).cell(nl.s).cell(r.e0).cell(r.e1).cell(nl.e0).cell(nl.e1).end_row();
    s.cell(l.x).cell(l.s).cell(r.s).cell(nl.s).end_row();
  }
  manifest.artifact("spectrum.csv", columns::spectrum);
  manifest.artifact("schedule.csv", columns::schedule_curve);
  if (rc.problem.family == ProblemFamily::Sat3) manifest.results()["instance_seed"] = instance_seed;
  manifest.flush();
  return 0;
}

// --- stats --------------------------------------------------------------------------

struct StatsArgs {
  std::string schedule = "linear";
  int samples = 10'000;
  std::string clauses = "1..6";
  int bins = 40;
  double hist_max = 4.0;
  int resamples = kDefaultBootstrapResamples;
};

int cmd_stats(const CommonOptions& common, const StatsArgs& args) {
  ConfigLayer base;
  if (!is_builtin_schedule(args.schedule)) base = record_layer(read_schedule_record(args.schedule));
  if (base.empty()) base["problem.family"] = "sat3";
  const RunConfig rc = common.resolve(base);
  if (rc.problem.family != ProblemFamily::Sat3) throw ConfigError("stats needs problem.family = sat3", "problem.family");
  Manifest manifest("stats", rc);
  manifest.input("schedule", args.schedule);
  const auto [lo, hi] = parse_range(args.clauses, "clauses");
  const auto blocks =
      infidelity_campaign(make_schedule(args.schedule, rc), rc.problem, lo, hi, args.samples, rc.seed, rc.jobs, args.resamples);

  CsvWriter raw(manifest.path("infidelity.csv"), columns::infidelity);
  CsvWriter st(manifest.path("infidelity_stats.csv"), columns::infidelity_stats);
  CsvWriter hist(manifest.path("infidelity_hist.csv"), columns::infidelity_hist);
  const double wd = wigner_dyson_second_moment(WignerDysonEnsemble::GOE);
  const auto hists = rescaled_histograms(blocks, args.hist_max, args.bins);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    for (std::size_t k = 0; k < blk.samples.size(); ++k)
      raw.cell(blk.n_clauses).cell(static_cast<long>(k)).cell(blk.samples[k]).end_row();
    st.cell(blk.n_clauses).cell(static_cast<long>(blk.samples.size())).cell(blk.unsatisfiable_count).cell(blk.mean);
    st.cell(blk.second_moment).cell(blk.bootstrap_se).cell(wd).cell((blk.second_moment - wd) / wd).cell(blk.ks_goe);
    st.end_row();
    const auto& h = hists[b];
    for (std::size_t k = 0; k < h.density.size(); ++k)
      hist.cell(blk.n_clauses).cell(h.lo + h.width * k).cell(h.lo + h.width * (k + 1)).cell(h.density[k]).end_row();
    std::printf("N_C=%d mean infidelity %.6f  second moment %.4f +- %.4f (GOE %.4f)\n", blk.n_clauses, blk.mean,
                blk.second_moment, blk.bootstrap_se, wd);
  }
  write_json(manifest.path("wd_constants.json"), wigner_dyson_constants());
  manifest.artifact("infidelity.csv", columns::infidelity);
  manifest.artifact("infidelity_stats.csv", columns::infidelity_stats);
  manifest.artifact("infidelity_hist.csv", columns::infidelity_hist);
  manifest.artifact("wd_constants.json");
  manifest.flush();
  return 0;
}

// --- transfer --------------------------------------------------------------------------

struct TransferArgs {
  std::string schedule;
  std::string n_range = "11..16";
};

int cmd_transfer(const CommonOptions& common, const TransferArgs& args) {
  const auto source = read_schedule_record(args.schedule);
  if (source.problem != "grover" || source.variant != "easy")
    throw ConfigError("transfer needs an easy-Grover schedule record", "schedule");
  const RunConfig rc = common.resolve(record_layer(source));
  Manifest manifest("transfer", rc);
  manifest.input("schedule", args.schedule);
  const auto [lo, hi] = parse_range(args.n_range, "n_range");
  const auto rows = transfer_study(source, lo, hi, rc.problem.min_steps);
  CsvWriter w(manifest.path("transfer.csv"), columns::transfer);
  for (const auto& r : rows) {
    w.cell(r.n).cell(r.total_time).cell(r.infidelity_rl).cell(r.infidelity_linear).end_row();
    std::printf("n=%d T=%.4g infidelity rl %.6f linear %.6f\n", r.n, r.total_time, r.infidelity_rl, r.infidelity_linear);
  }
  manifest.artifact("transfer.csv", columns::transfer);
  manifest.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealing-schedule design with a deep-Q agent"};
  app.set_version_flag("--version", AQCRL_VERSION);
  app.require_subcommand(1);

  CommonOptions common;

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a schedule");
  common.attach(train);
  train->add_option("--resume", train_args.resume, "Continue from a checkpoint");
  train->add_option("--init-schedule", train_args.init_schedule, "Warm start: initial path from a schedule record");
  train->add_option("--init-checkpoint", train_args.init_checkpoint, "Warm start: network and best path of a previous run");
  train->add_flag("--stop-at-threshold", train_args.stop_at_threshold, "Stop when the reward first reaches the threshold");
  train->add_option("--checkpoint-every", train_args.checkpoint_every, "Write a checkpoint every N cycles (0: only at the end)");
  train->add_option("--max-steps", train_args.max_steps, "Stop after this many path-state iterations in total (0: no limit)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a schedule");
  common.attach(eval);
  eval->add_option("--schedule", eval_args.schedule, "linear | roland-cerf | schedule record");
  eval->add_option("--samples", eval_args.samples, "3-SAT instances per clause count");
  eval->add_option("--clauses", eval_args.clauses, "3-SAT clause counts, N or LO..HI");

  BaselineArgs baseline_args;
  auto* baseline = app.add_subcommand("baseline", "Linear and Roland-Cerf Grover baselines");
  common.attach(baseline);
  baseline->add_option("--kind", baseline_args.kind, "linear | roland-cerf | all");
  baseline->add_option("--n-list", baseline_args.n_list, "Qubit counts (default 1 2 4 6 8 10)");

  SpectrumArgs spectrum_args;
  auto* spectrum = app.add_subcommand("spectrum", "Spectrum and dynamical energy along schedules");
  common.attach(spectrum);
  spectrum->add_option("--schedule", spectrum_args.schedule, "Schedule record (or linear / roland-cerf)")->required();
  spectrum->add_option("--grid", spectrum_args.grid, "Points on t/T");
  spectrum->add_option("--instance-seed", spectrum_args.instance_seed, "3-SAT instance seed");

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Rescaled infidelity statistics over random 3-SAT instances");
  common.attach(stats);
  stats->add_option("--schedule", stats_args.schedule, "linear | schedule record");
  stats->add_option("--samples", stats_args.samples, "Instances per clause count");
  stats->add_option("--clauses", stats_args.clauses, "Clause counts, N or LO..HI");
  stats->add_option("--bins", stats_args.bins, "Histogram bins");
  stats->add_option("--hist-max", stats_args.hist_max, "Upper edge of the histogram (rescaled units)");
  stats->add_option("--resamples", stats_args.resamples, "Bootstrap resamples");

  TransferArgs transfer_args;
  auto* transfer = app.add_subcommand("transfer", "Apply an easy-Grover schedule to larger registers");
  common.attach(transfer);
  transfer->add_option("--schedule", transfer_args.schedule, "Source schedule record")->required();
  transfer->add_option("--n-range", transfer_args.n_range, "Target qubit counts, LO..HI");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return cmd_train(common, train_args);
    if (*eval) return cmd_eval(common, eval_args);
    if (*baseline) return cmd_baseline(common, baseline_args);
    if (*spectrum) return cmd_spectrum(common, spectrum_args);
    if (*stats) return cmd_stats(common, stats_args);
    if (*transfer) return cmd_transfer(common, transfer_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
