#pragma once

#include <filesystem>

#include "sonochain/region_splitter.hpp"

namespace sonochain {

// Minimal PGM (P2/P5) reader and writer; the engine's raster substrate.
Raster load_pgm(const std::filesystem::path& path);
void save_pgm(const Raster& raster, const std::filesystem::path& path);

}  // namespace sonochain
