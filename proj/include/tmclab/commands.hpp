#pragma once

// The CLI subcommands as library calls: each returns a deterministic JSON
// report, CSV files by name, and an exit code (0 ok, 1 property failures,
// 2 invalid input, 3 resource cap).

#include <map>
#include <optional>
#include <string>

#include "tmclab/audit.hpp"
#include "tmclab/block_spectra.hpp"
#include "tmclab/scenario.hpp"

namespace tmc {

inline constexpr const char* kToolVersion = "tmclab 1.0.0";

struct CommandResult {
  nlohmann::json report;
  std::map<std::string, std::string> files;  // file name -> contents
  int exit_code = 0;
};

// Blocks computed on `jobs` threads; the result does not depend on `jobs`.
std::vector<BlockSpectrum> parallel_block_spectra(const TransitionMatrix& m, const Function& a, const Function& b,
                                                  Index n_min, Index n_max, const SpectraOptions& opt, int jobs);

struct SpectrumAnalysis {
  CommutatorKind kind = CommutatorKind::Plain;
  Index n_min = 0, n_max = -1;
  double entropy = 0.0;
  double beta = 2.0;             // predicted norm ratio: kappa, or kappa^2 for the mixed commutator
  double threshold = 1.0;        // rank exponent (h, or 2h when mixed) over log beta
  double predicted_slope = -1.0; // -log beta over the rank exponent
  std::vector<BlockSpectrum> blocks;
  std::vector<Index> untrusted;
  SingularSpectrum merged;       // trusted blocks only

  // R_n = 0 for every trusted n < first_nonzero, witnessed on at least one block
  std::optional<Index> first_nonzero;
  std::vector<Index> zero_witnesses;
  DecayFit norm_fit;  // log ||R_n|| against n, trusted nonzero blocks
  DecayFit rank_fit;  // log rank(R_n) against n
  double rank_rate = 0.0;  // h + 0.05, or 2h + 0.05 for the mixed commutator
  double rank_C = 0.0;     // fitted on the first half of the nonzero blocks
  bool rank_bound_holds = false;
  std::vector<Index> rank_bound_failures;
  BoundCertificate schedule;
  bool schedule_holds = false;
  std::optional<DecayFit> exponent_fit;  // log s_m against log m over the merged spectrum
  std::vector<SummabilityVerdict> verdicts;
};

SpectrumAnalysis analyze_spectrum(const Scenario& sc, const Function& a, const Function& b, CommutatorKind kind,
                                  Index n_min, Index n_max, const std::vector<double>& p_grid, int jobs = 1);
nlohmann::json analysis_to_json(const SpectrumAnalysis& s);

CommandResult cmd_validate(const Scenario& sc);
CommandResult cmd_metric_audit(const Scenario& sc);
CommandResult cmd_auf_audit(const Scenario& sc);
CommandResult cmd_spectrum(const Scenario& sc, int jobs = 1);
CommandResult cmd_fredholm(const Scenario& sc, int jobs = 1);
// All of the above; files are prefixed by the command name.
CommandResult cmd_report_all(const Scenario& sc, int jobs = 1);

// Levels as "index,value,multiplicity" with 17 significant digits.
std::string spectrum_csv(const SingularSpectrum& s);
std::string fmt17(double v);

}  // namespace tmc
