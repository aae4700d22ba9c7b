#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "fbmchar/types.hpp"

namespace fbm {

/// Path CSV: header `path_id,t,value`, one row per grid point per path,
/// numbers printed with 17 significant digits.
void write_paths_csv(std::ostream& out, std::span<const SamplePath> paths);
void write_paths_csv(const std::filesystem::path& file, std::span<const SamplePath> paths);

/// Reads a path CSV. Paths must share one uniform grid starting at t = 0 and
/// must start at value 0. Path ids must be 0..N-1 in order of first appearance.
std::vector<SamplePath> read_paths_csv(std::istream& in, PathRole role = PathRole::X);
std::vector<SamplePath> read_paths_csv(const std::filesystem::path& file, PathRole role = PathRole::X);

}  // namespace fbm
