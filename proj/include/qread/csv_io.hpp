#pragma once

#include <filesystem>
#include <string>

#include "qread/core_model.hpp"
#include "qread/gaussian_channel.hpp"
#include "qread/poisson_channel.hpp"

namespace qread {

// Time-series files are CSV with a one-line header; numbers are written with
// 17 significant digits so values round-trip bit-exactly.

void write_gaussian_record_csv(const std::filesystem::path& path, const GaussianRecord& record);
void write_count_record_csv(const std::filesystem::path& path, const CountRecord& record);
void write_trajectory_csv(const std::filesystem::path& path, const HiddenTrajectory& traj);
void write_llr_trace_csv(const std::filesystem::path& path, const LLRTrace& trace);
void write_poisson_trace_csv(const std::filesystem::path& path, const PoissonLLRTrace& trace);

// Readers validate the header, the row count against the grid, and the time
// column against the grid times.
GaussianRecord read_gaussian_record_csv(const std::filesystem::path& path, const TimeGrid& grid);
CountRecord read_count_record_csv(const std::filesystem::path& path, const TimeGrid& grid,
                                  const RateSchedule& lambda0);

std::string format_double(double v);  // %.17g

}  // namespace qread
