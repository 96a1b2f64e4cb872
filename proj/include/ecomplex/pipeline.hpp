#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/econometrics.hpp"
#include "ecomplex/jumps.hpp"
#include "ecomplex/panel.hpp"

namespace ecomplex {

struct RunConfig {
  std::string trade_csv;
  std::string covariates_csv;
  std::string out_dir = "out";

  TradeSchema trade_schema;  // column mapping and year window
  FilterConfig filters;

  double rca_threshold = 1.0;
  EciMethod eci_method = EciMethod::Eigenvector;
  int eci_max_iter = 1000;
  double eci_tol = 1e-9;
  bool pooled_proximity = false;

  int delta = 2;              // interval length / transition gap
  int interval_anchor = 1970; // first interval start on the non-overlapping grid
  int backward_window = 4;
  int forward_window = 4;

  int horizon = 4;          // entry-probability curve horizon
  int curve_bins = 20;
  int hist_bins = 30;

  bool stage_cuts_auto = true;  // terciles of the pooled rho distribution
  double stage_cut_low = -1.0 / 3.0;
  double stage_cut_high = 1.0 / 3.0;
  int sigmoid_bins = 20;

  GrowthMethod growth_method = GrowthMethod::Geometric;
  int table1_end_year = 2010;
  int table2_end_year = 2008;
  std::vector<int> delta_sweep;  // extra interval lengths for the robustness table
  bool include_censored = false;
  int autocorr_max_lag = 5;

  int threads = 1;
  std::uint64_t seed = 0;  // reserved for synthetic/test modes, echoed in the manifest

  JumpConfig jump_config() const;
  void validate() const;
};

// Parses a key = value config file (# comments allowed; unknown keys are an
// error) and applies the ECOMPLEX_OUT / ECOMPLEX_THREADS environment
// overrides.
RunConfig load_config(const std::string& path);

// Stage runners. Each writes its artifacts under cfg.out_dir and registers
// them in manifest.json; each is runnable on its own given the upstream
// artifacts (ingest first, the rest from the persisted panel).
void run_ingest(const RunConfig& cfg);
void run_complexity(const RunConfig& cfg);
void run_proximity(const RunConfig& cfg);
void run_jumps(const RunConfig& cfg);
void run_directions(const RunConfig& cfg);
void run_stages(const RunConfig& cfg);
void run_regress(const RunConfig& cfg);

// ingest through regress in dependency order, sharing one in-memory
// analysis; writes every artifact plus the manifest.
void run_pipeline(const RunConfig& cfg);

// Renders the human-readable report from a completed artifact directory
// (verifying manifest hashes) and writes report.txt. Returns the text.
std::string run_report(const std::string& artifact_dir);

}  // namespace ecomplex
