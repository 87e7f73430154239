#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cadmm/model.hpp"

namespace cadmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

/// Header of the per-trial report CSV written by `solve`.
inline constexpr const char* kReportHeader =
    "seed,phase1_iters,phase2_iters,objective,max_violation,kkt_stationarity,mse_db,wall_time,"
    "violations,restarts";

/// Header of the aggregate CSV written by `campaign`.
inline constexpr const char* kCampaignHeader =
    "kind,n,m,trials,feasible_rate,resolution_rate,mean_objective,mean_violations,mean_mse_db,"
    "mean_wall_time";

/// Header of the per-iteration trace CSV.
inline constexpr const char* kTraceHeader = "iteration,phase,consensus,successive,objective";

std::string report_row(std::uint64_t seed, const SolveReport& r);

/// Runs the command line (args[0] is the program name); returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cadmm::cli
