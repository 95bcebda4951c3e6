#include "dunesim/dsf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace dunesim {

static_assert(std::endian::native == std::endian::little,
              "DSF1 writer assumes a little-endian host");
static_assert(sizeof(double) == 8);

namespace {
constexpr char kMagic[4] = {'D', 'S', 'F', '1'};

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
}  // namespace

void write_dsf1(const std::string& path, const std::vector<ScalarField>& fields) {
  if (fields.empty()) throw std::invalid_argument("write_dsf1: no fields");
  const Grid g = fields.front().grid;
  for (const auto& f : fields) require_same_grid(g, f.grid, "write_dsf1");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_dsf1: cannot open " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(g.n));
  put_u32(os, static_cast<std::uint32_t>(fields.size()));
  put_u32(os, 0u);
  for (const auto& f : fields)
    os.write(reinterpret_cast<const char*>(f.v.data()),
             static_cast<std::streamsize>(sizeof(double) * f.v.size()));
  if (!os) throw std::runtime_error("write_dsf1: short write to " + path);
}

std::vector<ScalarField> read_dsf1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_dsf1: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_dsf1: bad magic in " + path);
  const std::uint32_t n = get_u32(is);
  const std::uint32_t count = get_u32(is);
  const std::uint32_t reserved = get_u32(is);
  if (!is || reserved != 0)
    throw std::runtime_error("read_dsf1: corrupt header in " + path);
  Grid g(static_cast<int>(n));
  std::vector<ScalarField> fields;
  fields.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    ScalarField field(g);
    is.read(reinterpret_cast<char*>(field.v.data()),
            static_cast<std::streamsize>(sizeof(double) * field.v.size()));
    if (!is) throw std::runtime_error("read_dsf1: truncated payload in " + path);
    fields.push_back(std::move(field));
  }
  return fields;
}

}  // namespace dunesim
