#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dmasense/tuner.hpp"

namespace dmasense {

inline constexpr const char* kToolVersion = "0.1.0";

enum class SweepVariable { bandwidth_b, leakage_lambda, tuning_btune, power_p };

const char* sweep_variable_name(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::bandwidth_b;
  std::vector<double> grid;  // nonempty, ascending
  std::string output_dir;    // empty = do not write files
  bool reoptimize = false;
  bool single_path = false;
  // Bandwidth sweeps vary the spacing at fixed K by default; with
  // fixed_spacing set they keep the spacing and vary the subcarrier count.
  bool fixed_spacing = false;
  std::uint64_t seed = 1;
  int budget = 200;  // tuner budget when reoptimize is set
  int threads = 1;

  void validate() const;
};

/// Column-oriented sweep result. One row per grid point; a nonempty entry in
/// `errors` marks a failed point whose row holds NaNs (the CSV renders it as
/// a comment so the schema stays rectangular).
struct SweepTable {
  std::vector<std::string> metadata;  // emitted as '#'-prefixed header lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> errors;

  int column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
  bool all_rows_ok() const;
  void write_csv(std::ostream& out) const;
};

/// Delay-information sweep: vary B = K * delta_f at fixed K. Columns:
/// b_hz, j_tautau_exact, j_tautau_predicted, peb_exact, peb_approx, beta_eff2_hz2.
SweepTable run_bandwidth_sweep(const Scenario& base, const SweepSpec& spec);

/// Leakage sweep over the waveguide leakage fraction. Columns:
/// lambda, a_leak, j_phiphi_exact, j_phiphi_approx, g_mean, d_eff2_m2_mean,
/// crb_delay_exact, crb_delay_firstorder, peb_exact. The matched
/// configuration is frozen at Lambda = 0 so every point sees the same tuning.
SweepTable run_leakage_sweep(const Scenario& base, const SweepSpec& spec);

/// Basic sweep for the remaining variables (tuning bandwidth, transmit
/// power). Columns: x, peb_exact, crb_delay_tau0, crb_aoa_phi0.
SweepTable run_generic_sweep(const Scenario& base, const SweepSpec& spec);

struct ValidateOptions {
  std::uint64_t seed = 1;
  // Test hook: perturb the delay-EFIM prediction so exactly that check fails.
  bool inject_delay_prediction_error = false;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<std::string> metadata;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  void write_text(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

/// Runs every identity/oracle check of the bound engine and the
/// proposition diagnostics on the given scenario; deterministic for fixed
/// (scenario, options).
ValidationReport validate_propositions(const Scenario& s,
                                       const ValidateOptions& options = {});

/// Spearman rank correlation (average ranks on ties).
double spearman_rank_correlation(std::span<const double> a,
                                 std::span<const double> b);

/// Write `content` to dir/name, creating directories as needed.
void write_output_file(const std::string& dir, const std::string& name,
                       const std::string& content);

}  // namespace dmasense
