#pragma once

#include <filesystem>
#include <stdexcept>

#include "delaybt/system.hpp"

namespace dbt {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix Market dense array format ("%%MatrixMarket matrix array real general"),
/// column-major, 17 significant digits.
void write_matrix_market(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_market(const std::filesystem::path& path);

/// Saves the system as a JSON manifest next to one Matrix Market file per
/// matrix. File names derive from the manifest stem.
void save_system(const DelaySystem& sys, const std::filesystem::path& manifest_path);
DelaySystem load_system(const std::filesystem::path& manifest_path);

}  // namespace dbt
