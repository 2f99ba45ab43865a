#include "ltr/io/ply.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ltr/error.hpp"

namespace ltr::io {

static_assert(std::endian::native == std::endian::little, "binary PLY assumes a little-endian host");

namespace {

struct TypeInfo {
  PlyType type;
  const char* name;
  const char* alias;
  int size;
};

constexpr TypeInfo kTypes[] = {
    {PlyType::Int8, "char", "int8", 1},       {PlyType::UInt8, "uchar", "uint8", 1},
    {PlyType::Int16, "short", "int16", 2},    {PlyType::UInt16, "ushort", "uint16", 2},
    {PlyType::Int32, "int", "int32", 4},      {PlyType::UInt32, "uint", "uint32", 4},
    {PlyType::Float32, "float", "float32", 4}, {PlyType::Float64, "double", "float64", 8},
};

const TypeInfo& info(PlyType t) {
  for (const auto& ti : kTypes)
    if (ti.type == t) return ti;
  throw FormatError("unknown PLY type");
}

PlyType parse_type(const std::string& s) {
  for (const auto& ti : kTypes)
    if (s == ti.name || s == ti.alias) return ti.type;
  throw FormatError("unsupported PLY property type '" + s + "'");
}

double read_binary(const char* p, PlyType t) {
  switch (t) {
    case PlyType::Int8: return static_cast<std::int8_t>(*p);
    case PlyType::UInt8: return static_cast<std::uint8_t>(*p);
    case PlyType::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float32: { float v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

void write_binary(std::string& out, double v, PlyType t) {
  auto put = [&out](const auto& x) {
    const char* b = reinterpret_cast<const char*>(&x);
    out.append(b, sizeof(x));
  };
  switch (t) {
    case PlyType::Int8: put(static_cast<std::int8_t>(v)); break;
    case PlyType::UInt8: put(static_cast<std::uint8_t>(v)); break;
    case PlyType::Int16: put(static_cast<std::int16_t>(v)); break;
    case PlyType::UInt16: put(static_cast<std::uint16_t>(v)); break;
    case PlyType::Int32: put(static_cast<std::int32_t>(v)); break;
    case PlyType::UInt32: put(static_cast<std::uint32_t>(v)); break;
    case PlyType::Float32: put(static_cast<float>(v)); break;
    case PlyType::Float64: put(v); break;
  }
}

bool is_integer(PlyType t) { return t != PlyType::Float32 && t != PlyType::Float64; }

struct Column {
  std::string name;
  PlyType type;
  std::vector<double> values;
};

}  // namespace

const PlyProperty* PlyData::find(const std::string& name) const {
  for (const auto& p : extra)
    if (p.name == name) return &p;
  return nullptr;
}

PlyData read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw FormatError(path + ": not a PLY file");

  PlyFormat format = PlyFormat::Ascii;
  std::size_t vertex_count = 0;
  bool in_vertex = false, seen_vertex = false;
  std::vector<Column> cols;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "end_header") break;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string f;
      ls >> f;
      if (f == "ascii") format = PlyFormat::Ascii;
      else if (f == "binary_little_endian") format = PlyFormat::BinaryLittleEndian;
      else throw FormatError(path + ": unsupported PLY format " + f);
    } else if (kw == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex) {
        vertex_count = count;
        seen_vertex = true;
      } else if (!seen_vertex) {
        throw FormatError(path + ": elements before 'vertex' are not supported");
      }
    } else if (kw == "property") {
      if (!in_vertex) continue;
      std::string type, name;
      ls >> type;
      if (type == "list") throw FormatError(path + ": list properties on vertices are not supported");
      ls >> name;
      cols.push_back({name, parse_type(type), {}});
    } else {
      throw FormatError(path + ": unexpected header line '" + line + "'");
    }
  }
  if (!seen_vertex) throw FormatError(path + ": no vertex element");
  for (auto& c : cols) c.values.resize(vertex_count);

  if (format == PlyFormat::Ascii) {
    for (std::size_t i = 0; i < vertex_count; ++i) {
      for (auto& c : cols) {
        if (!(in >> c.values[i])) throw FormatError(path + ": truncated ASCII body");
      }
    }
  } else {
    std::size_t stride = 0;
    for (const auto& c : cols) stride += info(c.type).size;
    std::vector<char> buf(stride * vertex_count);
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
      throw FormatError(path + ": truncated binary body");
    for (std::size_t i = 0; i < vertex_count; ++i) {
      const char* p = buf.data() + i * stride;
      for (auto& c : cols) {
        c.values[i] = read_binary(p, c.type);
        p += info(c.type).size;
      }
    }
  }

  auto take = [&cols](const char* name) -> Column* {
    for (auto& c : cols)
      if (c.name == name) return &c;
    return nullptr;
  };
  Column *x = take("x"), *y = take("y"), *z = take("z");
  if (!x || !y || !z) throw FormatError(path + ": x, y, z properties are required");

  PlyData data;
  auto& pc = data.cloud;
  pc.positions.resize(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i)
    pc.positions[i] = geometry::Vec3(x->values[i], y->values[i], z->values[i]);

  Column *r = take("red"), *g = take("green"), *b = take("blue");
  if (r && g && b) {
    pc.colors.resize(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i)
      pc.colors[i] = {static_cast<std::uint8_t>(r->values[i]), static_cast<std::uint8_t>(g->values[i]),
                      static_cast<std::uint8_t>(b->values[i])};
  }
  Column *nx = take("nx"), *ny = take("ny"), *nz = take("nz");
  if (nx && ny && nz) {
    pc.normals.resize(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i)
      pc.normals[i] = geometry::Vec3(nx->values[i], ny->values[i], nz->values[i]);
  }
  if (Column* f = take("frame")) pc.frame_index.assign(f->values.begin(), f->values.end());
  if (Column* l = take("label")) pc.labels.assign(l->values.begin(), l->values.end());
  if (Column* c = take("confidence")) pc.confidences.assign(c->values.begin(), c->values.end());

  static const char* kKnown[] = {"x", "y", "z", "red", "green", "blue", "nx", "ny", "nz",
                                 "frame", "label", "confidence"};
  for (auto& c : cols) {
    bool known = false;
    for (const char* k : kKnown) known = known || c.name == k;
    if (!known) data.extra.push_back({c.name, c.type, std::move(c.values)});
  }
  return data;
}

void write_ply(const std::string& path, const pointcloud::PointCloud& cloud,
               const std::vector<PlyProperty>& extra, PlyFormat format) {
  cloud.validate();
  const std::size_t n = cloud.size();
  for (const auto& e : extra)
    if (e.values.size() != n) throw InvalidArgument("extra PLY property '" + e.name + "' has wrong length");

  std::vector<Column> cols;
  auto add = [&](const char* name, PlyType t, auto&& get) {
    Column c{name, t, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) c.values[i] = get(i);
    cols.push_back(std::move(c));
  };
  add("x", PlyType::Float32, [&](std::size_t i) { return cloud.positions[i].x(); });
  add("y", PlyType::Float32, [&](std::size_t i) { return cloud.positions[i].y(); });
  add("z", PlyType::Float32, [&](std::size_t i) { return cloud.positions[i].z(); });
  if (cloud.has_colors()) {
    add("red", PlyType::UInt8, [&](std::size_t i) { return double(cloud.colors[i][0]); });
    add("green", PlyType::UInt8, [&](std::size_t i) { return double(cloud.colors[i][1]); });
    add("blue", PlyType::UInt8, [&](std::size_t i) { return double(cloud.colors[i][2]); });
  }
  if (cloud.has_normals()) {
    add("nx", PlyType::Float32, [&](std::size_t i) { return cloud.normals[i].x(); });
    add("ny", PlyType::Float32, [&](std::size_t i) { return cloud.normals[i].y(); });
    add("nz", PlyType::Float32, [&](std::size_t i) { return cloud.normals[i].z(); });
  }
  if (cloud.has_frame_index())
    add("frame", PlyType::Int32, [&](std::size_t i) { return double(cloud.frame_index[i]); });
  if (cloud.has_labels()) add("label", PlyType::Int32, [&](std::size_t i) { return double(cloud.labels[i]); });
  if (cloud.has_confidences())
    add("confidence", PlyType::Float32, [&](std::size_t i) { return cloud.confidences[i]; });
  for (const auto& e : extra) cols.push_back({e.name, e.type, e.values});

  std::string out;
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(n) + "\n";
  for (const auto& c : cols) out += std::string("property ") + info(c.type).name + " " + c.name + "\n";
  out += "end_header\n";

  if (format == PlyFormat::Ascii) {
    std::ostringstream os;
    os << std::setprecision(9);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k) os << ' ';
        const double v = cols[k].values[i];
        if (is_integer(cols[k].type)) os << static_cast<long long>(v);
        else if (cols[k].type == PlyType::Float32) os << static_cast<float>(v);
        else os << std::setprecision(17) << v << std::setprecision(9);
      }
      os << '\n';
    }
    out += os.str();
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& c : cols) write_binary(out, c.values[i], c.type);
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace ltr::io
