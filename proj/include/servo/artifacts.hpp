#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "servo/config.hpp"
#include "servo/pso.hpp"
#include "servo/sim.hpp"

namespace servo {

/// Shortest decimal form that parses back to exactly the same double.
std::string double_to_string(double v);

inline constexpr const char* kTrajectoryHeader =
    "t,y_des,y,u,e1,e2,theta_f_norm,theta_g_norm,P1,P2,x,flags";

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);
/// Inverse of trajectory_csv; throws std::runtime_error naming the bad line.
std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text);

/// One line per recorded swarm round: `iter,gbest,mean`. Header only when
/// the optimizer never ran.
std::string convergence_csv(const PsoResult* pso);

/// Everything the textual run report may carry. Wall-clock time is
/// deliberately absent: reports must be byte-identical across reruns.
struct ReportSpec {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, const RunResult*>> arms;
    std::optional<double> ise_ratio;
    const PsoResult* pso = nullptr;        ///< null = optimizer skipped
    std::optional<double> selftest_gbest;  ///< sphere benchmark result
    std::vector<std::string> artifacts;    ///< relative file names, report included
    const ExperimentConfig* config = nullptr;
};

std::string report_text(const ReportSpec& spec);

/// Overlay of desired vs both arms, self-contained SVG. The desired curve is
/// taken from the baseline rows (both arms track the same profile).
std::string compare_svg(const std::vector<TrajectoryRow>& baseline,
                        const std::vector<TrajectoryRow>& optimized);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace servo
