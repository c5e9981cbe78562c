#include "pmflow/field_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace pmflow {
namespace {
constexpr char kMagic[8] = {'P', 'M', 'F', 'L', 'D', '0', '1', '\n'};
}

void write_field_binary(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open " + path);
  out.write(kMagic, 8);
  int32_t dim = f.grid.dim();
  int32_t nx = f.grid.nx();
  int32_t ny = f.grid.dim() == 2 ? f.grid.ny() : 1;
  double Lx = f.grid.length(0);
  double Ly = f.grid.dim() == 2 ? f.grid.length(1) : f.grid.length(0);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&ny), 4);
  out.write(reinterpret_cast<const char*>(&Lx), 8);
  out.write(reinterpret_cast<const char*>(&Ly), 8);
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * 8));
  if (!out) throw std::runtime_error("write_field_binary: write failed " + path);
}

ScalarField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field_binary: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("read_field_binary: bad magic in " + path);
  int32_t dim, nx, ny;
  double Lx, Ly;
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&ny), 4);
  in.read(reinterpret_cast<char*>(&Lx), 8);
  in.read(reinterpret_cast<char*>(&Ly), 8);
  if (!in) throw std::runtime_error("read_field_binary: truncated header " + path);
  Grid g(dim, {nx, ny}, {Lx, Ly});
  ScalarField f(g);
  in.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * 8));
  if (!in) throw std::runtime_error("read_field_binary: truncated payload " + path);
  return f;
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  const Grid& g = f.grid;
  if (g.dim() == 1) {
    std::fprintf(out, "x,value\n");
    for (int ix = 0; ix < g.nx(); ++ix)
      std::fprintf(out, "%.17g,%.17g\n", g.coord(0, ix), f.at(ix));
  } else {
    std::fprintf(out, "x,y,value\n");
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix)
        std::fprintf(out, "%.17g,%.17g,%.17g\n", g.coord(0, ix), g.coord(1, iy),
                     f.at(ix, iy));
  }
  std::fclose(out);
}

}  // namespace pmflow
