#pragma once

// JSON views of the module results, the subcommand driver and the
// consolidated verification report.

#include "morselab/config.hpp"
#include "morselab/geometry.hpp"
#include "morselab/harmonic.hpp"
#include "morselab/rigidity.hpp"
#include "morselab/spectral.hpp"
#include "morselab/variational.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace morselab {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_inconclusive = 3 };

nlohmann::json to_json(const SpectralReport& report);
nlohmann::json to_json(const HarmonicData& data);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const MultiplicityScan& scan);
nlohmann::json to_json(const FrameResiduals& frame);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const LevelSetChecks& checks);
nlohmann::json to_json(const TotalCurvature& tc);

/// CSV `S,l,lambda1,lambda2,neg_count`; missing eigenvalues are empty cells.
std::string spectrum_csv(const SpectralReport& report);

struct Check {
    std::string check_id;
    std::string paper_ref;  // short label of the statement being checked
    nlohmann::json measured;
    nlohmann::json expected;
    nlohmann::json tol;
    bool pass = false;
};

nlohmann::json to_json(const Check& check);

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand and writes its artifacts into config.output_dir.
/// Returns an ExitCode; configuration problems are thrown as InputError.
int run_subcommand(const std::string& name, const RunConfig& config, std::ostream& log);

/// Every check of the `report` subcommand, in a fixed order. Throws
/// InconclusiveError when the mode sweep cannot terminate.
std::vector<Check> verification_checks(const RunConfig& config, std::ostream& log);

}  // namespace morselab
