#pragma once

// Run persistence (JSON), CSV tables, and atomic file writes.

#include <string>
#include <vector>

#include "sfqgate/calibration.hpp"
#include "sfqgate/decomposition.hpp"
#include "sfqgate/optimizer.hpp"
#include "sfqgate/sequence_io.hpp"

namespace sfq {

std::string run_to_json(const OptimizationRun& run);
OptimizationRun run_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const OptimizationRun& run);
OptimizationRun load_checkpoint(const std::string& path);

std::string report_to_json(const GateReport& report);
std::string calibration_to_json(const CalibrationResult& result);

/// Columns: hold_ns,infidelity,theta,phi
std::string sweep_csv(const std::vector<FsimSweepRow>& rows);

/// Writes to a temporary file beside `path`, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);
void write_file_atomic(const std::string& path, const Bytes& contents);
Bytes read_file_bytes(const std::string& path);

}  // namespace sfq
