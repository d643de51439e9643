#include "sonochain/pgm.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace sonochain {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
std::string next_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw ParseError("truncated PGM header");
}

}  // namespace

Raster load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("image not found: " + path.string());

  std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5")
    throw ParseError("unsupported image format (expected PGM P2/P5): " +
                     path.string());
  int width = std::stoi(next_token(in));
  int height = std::stoi(next_token(in));
  int maxval = std::stoi(next_token(in));
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255)
    throw ParseError("invalid PGM dimensions in " + path.string());

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
      throw ParseError("truncated PGM pixel data in " + path.string());
  } else {
    for (auto& p : pixels) {
      int v = std::stoi(next_token(in));
      p = static_cast<std::uint8_t>(v);
    }
  }
  return Raster{width, height, std::move(pixels)};
}

void save_pgm(const Raster& raster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write image: " + path.string());
  out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.pixels.data()),
            static_cast<std::streamsize>(raster.pixels.size()));
}

}  // namespace sonochain
