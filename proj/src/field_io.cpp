#include "rigidlab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "rigidlab/errors.hpp"

namespace rigidlab {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "payload byte order assumes little-endian host");

json header_of(const TensorField& f) {
  const int n = f.dim();
  const Grid& g = f.grid();
  json shape = json::array();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Index3& e = f(i, j).extents();
      shape.push_back({e[0], e[1], e[2]});
    }
  return json{{"n", n},
              {"cells", {g.cells[0], g.cells[1], g.cells[2]}},
              {"shape", shape},
              {"components", n * n},
              {"placement", to_string(f.placement())},
              {"origin", {g.origin[0], g.origin[1], g.origin[2]}},
              {"spacing", {g.spacing[0], g.spacing[1], g.spacing[2]}},
              {"byte_order", "little"},
              {"element", "f64"},
              {"layout", "row-major"}};
}

}  // namespace

void dump_field(const TensorField& f, const std::string& stem) {
  f.validate();
  {
    std::ofstream h(stem + ".json");
    if (!h) throw InputError("cannot write " + stem + ".json");
    h << header_of(f).dump(2) << "\n";
  }
  std::ofstream b(stem + ".bin", std::ios::binary);
  if (!b) throw InputError("cannot write " + stem + ".bin");
  const int n = f.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = f(i, j).values();
      b.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
}

TensorField load_field(const std::string& stem, DomainPtr domain) {
  std::ifstream h(stem + ".json");
  if (!h) throw InputError("cannot read " + stem + ".json");
  json head;
  try {
    head = json::parse(h);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, "header");
  }
  Placement placement;
  try {
    const std::string p = head.at("placement").get<std::string>();
    if (p == "staggered") placement = Placement::staggered;
    else if (p == "cell_centered") placement = Placement::cell_centered;
    else throw ParseError("unknown placement " + p, 0, "placement");
    if (head.at("element").get<std::string>() != "f64") throw ParseError("element must be f64", 0, "element");
    if (head.at("byte_order").get<std::string>() != "little")
      throw ParseError("byte order must be little", 0, "byte_order");
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, "header");
  }
  TensorField f(domain, placement);
  if (head.value("n", 0) != f.dim()) throw ShapeError("dimension mismatch between dump and domain");
  json expect = header_of(f);
  if (head.at("shape") != expect.at("shape") || head.at("cells") != expect.at("cells"))
    throw ShapeError("dump shape does not match domain grid");

  std::ifstream b(stem + ".bin", std::ios::binary | std::ios::ate);
  if (!b) throw InputError("cannot read " + stem + ".bin");
  const auto bytes = static_cast<std::size_t>(b.tellg());
  std::size_t expected = 0;
  const int n = f.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) expected += f(i, j).size() * sizeof(double);
  if (bytes != expected)
    throw ShapeError("payload has " + std::to_string(bytes) + " bytes, header implies " +
                     std::to_string(expected));
  b.seekg(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = f(i, j).values();
      b.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
  f.validate();
  return f;
}

}  // namespace rigidlab
