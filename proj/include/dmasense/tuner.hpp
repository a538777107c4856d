#pragma once

#include <cstdint>
#include <vector>

#include "dmasense/fisher_bounds.hpp"

namespace dmasense {

enum class TuneMethod { random_search, coordinate_descent };
enum class TuneObjective { peb, delay_crb, aoa_crb };

struct TunerSettings {
  int budget = 500;  // objective evaluations, including the matched seed
  std::uint64_t seed = 1;
  TuneMethod method = TuneMethod::random_search;
  TuneObjective objective = TuneObjective::peb;
  int threads = 1;
};

/// Resonant frequencies (N values) matching one DMA state to a path: the
/// half-angle phase-alignment rule at the carrier, followed by a fixed
/// deterministic per-element 1-D refinement of the normalized carrier gain
/// under the tuning-range constraint.
std::vector<double> matched_configuration(const Scenario& s, int path);

/// J-state table; state j is matched to path (j mod L), so multiple states
/// cover the UE and the scatterers round-robin.
std::vector<double> matched_table(const Scenario& s);

struct TuneResult {
  std::vector<double> f_r_table;
  double objective = 0.0;
  int evaluations = 0;
};

/// Gradient-free minimization of the selected bound objective over the
/// resonant-frequency table. Candidate 0 is the matched table, so the result
/// is never worse than matched combining. Random candidates are drawn from
/// the seed alone (independent of the waveform), and ties resolve to the
/// lowest candidate index, so results are deterministic for fixed settings.
/// Throws SingularMatrixError when no candidate is localizable.
TuneResult optimize_peb(const Scenario& s, const TunerSettings& settings);

}  // namespace dmasense
