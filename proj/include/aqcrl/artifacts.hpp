#pragma once

// CSV and JSON artifacts written by the command-line tool. Column lists are
// the contract with the plotting scripts; every file is listed with its
// format version in the run manifest.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aqcrl/errors.hpp"
#include "aqcrl/experiments.hpp"
#include "aqcrl/statistics.hpp"

namespace aqcrl {

inline constexpr int kArtifactFormatVersion = 1;

namespace columns {

inline const std::vector<std::string> fidelity{"n", "T", "schedule_kind", "success_probability"};
inline const std::vector<std::string> sat_success{"n_bits",  "n_clauses",    "T",           "schedule_kind",
                                                  "samples", "unsatisfiable", "mean_success", "bootstrap_se"};
inline const std::vector<std::string> sat_instances{"n_clauses", "sample_index", "success", "unsatisfiable"};
inline const std::vector<std::string> spectrum{"t_over_T",     "E0",           "E1",        "E_dyn_linear", "E_dyn_rl",
                                               "E_dyn_nonlinear", "s_linear",  "s_rl",      "s_nonlinear",  "E0_rl",
                                               "E1_rl",        "E0_nonlinear", "E1_nonlinear"};
inline const std::vector<std::string> infidelity{"n_clauses", "sample_index", "infidelity"};
inline const std::vector<std::string> infidelity_stats{"n_clauses",      "samples",       "unsatisfiable",
                                                       "mean_infidelity", "second_moment", "bootstrap_se",
                                                       "wd_second_moment", "relative_difference", "ks_goe"};
inline const std::vector<std::string> infidelity_hist{"n_clauses", "bin_lo", "bin_hi", "density"};
inline const std::vector<std::string> schedule_curve{"x", "s_linear", "s_rl", "s_nonlinear"};
inline const std::vector<std::string> transfer{"n", "T", "infidelity_rl", "infidelity_linear"};
inline const std::vector<std::string> trace{"j",      "i",       "step",    "proposed_action", "action", "delta", "reward",
                                            "epsilon", "temperature", "loss", "training",        "target_refreshed"};

}  // namespace columns

// Shortest decimal text that reads back to the same double; "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path), width_(header.size()) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    write_cells(header);
  }

  CsvWriter& cell(double v) { return cell(format_number(v)); }
  CsvWriter& cell(long long v) { return cell(std::to_string(v)); }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }
  CsvWriter& cell(long v) { return cell(std::to_string(v)); }
  CsvWriter& cell(std::string v) {
    row_.push_back(std::move(v));
    return *this;
  }

  void end_row() {
    if (row_.size() != width_)
      throw StructuralError(path_.string() + ": row has " + std::to_string(row_.size()) + " cells, header has " +
                            std::to_string(width_));
    write_cells(row_);
    row_.clear();
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
    if (!out_) throw Error("write to " + path_.string() + " failed");
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
  std::vector<std::string> row_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to " + path.string() + " failed");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

// Unit-mean Wigner-Dyson surmises P(x) = A x^k exp(-B x^2), for overlays.
inline nlohmann::json wigner_dyson_constants() {
  nlohmann::json ens = nlohmann::json::object();
  for (auto e : {WignerDysonEnsemble::GOE, WignerDysonEnsemble::GUE}) {
    const auto f = surmise_form(e);
    ens[to_string(e)] = {{"prefactor", f.prefactor},
                         {"power", f.power},
                         {"exponent", f.exponent},
                         {"mean", 1.0},
                         {"second_moment", f.second_moment}};
  }
  return {{"format_version", kArtifactFormatVersion},
          {"form", "P(x) = prefactor * x^power * exp(-exponent * x^2)"},
          {"reference", "goe"},
          {"ensembles", std::move(ens)}};
}

inline void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace, int cutoff) {
  auto header = columns::trace;
  for (int m = 1; m <= cutoff; ++m) header.push_back("b" + std::to_string(m));
  CsvWriter w(path, header);
  for (const auto& r : trace) {
    w.cell(r.j).cell(r.i).cell(r.step).cell(r.proposed_action).cell(r.action).cell(r.delta).cell(r.reward);
    w.cell(r.epsilon).cell(r.temperature).cell(r.loss).cell(int{r.training}).cell(int{r.target_refreshed});
    for (double v : r.b) w.cell(v);
    w.end_row();
  }
}

}  // namespace aqcrl
