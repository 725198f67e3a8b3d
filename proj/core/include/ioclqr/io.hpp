#pragma once

#include <filesystem>
#include <string>

#include "ioclqr/forward.hpp"
#include "ioclqr/matops.hpp"
#include "ioclqr/trajectory.hpp"

namespace ioclqr {

// JSON file formats (doubles are written losslessly):
//  - trajectory: {"t0", "tf", "rows", "cols", "samples": [[row-major]...]}
//  - problem:    {"A", "B", "Q", "R", "F", "t0", "tf", "n_steps"} with
//                matrices as nested row arrays
//  - matrix:     a bare nested row array
// Writers go through a temp file plus rename, so partially written files are
// never observed.

void save_trajectory(const std::filesystem::path& path, const MatrixTraj& traj);
MatrixTraj load_trajectory(const std::filesystem::path& path);

void save_problem(const std::filesystem::path& path, const LqrProblem& problem);
LqrProblem load_problem(const std::filesystem::path& path);

void save_matrix(const std::filesystem::path& path, const Mat& m);
Mat load_matrix(const std::filesystem::path& path);

/// FNV-1a (64-bit) digest of the file bytes, hex-encoded. Used by reports to
/// identify inputs.
std::string file_digest(const std::filesystem::path& path);

}  // namespace ioclqr
