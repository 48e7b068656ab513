#include "eikinetic/vfld.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace eikinetic {

static_assert(std::endian::native == std::endian::little, "VFLD I/O assumes a little-endian host");

namespace {

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  throw Error(ErrorKind::Parse, "VFLD byte " + std::to_string(offset) + ": " + what);
}

}  // namespace

std::string encode_vfld(const VfldFile& file) {
  const GridSpec& g = file.grid;
  nlohmann::json header;
  header["magic"] = "VFLD1";
  header["dim"] = g.dim();
  header["shape"] = g.shape_vector();
  header["spacing"] = g.spacing_vector();
  header["origin"] = g.origin_vector();
  header["fields"] = nlohmann::json::array();
  for (const auto& f : file.fields) {
    if (f.data.size() != g.size() * static_cast<std::size_t>(f.components)) {
      throw Error(ErrorKind::Precondition, "field '" + f.name + "' has the wrong length");
    }
    header["fields"].push_back({{"name", f.name}, {"components", f.components}});
  }
  header["mask"] = file.mask.has_value();
  if (!file.provenance.is_null()) header["provenance"] = file.provenance;
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& f : file.fields) {
    const std::size_t off = out.size();
    out.resize(off + f.data.size() * sizeof(double));
    std::memcpy(out.data() + off, f.data.data(), f.data.size() * sizeof(double));
  }
  if (file.mask) {
    if (file.mask->size() != g.size()) throw Error(ErrorKind::Precondition, "mask has the wrong length");
    for (auto m : *file.mask) out.push_back(m ? '\x01' : '\x00');
  }
  return out;
}

VfldFile decode_vfld(std::string_view bytes) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) parse_error(bytes.size(), "missing header terminator");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, eol));
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(e.byte > 0 ? e.byte - 1 : 0, "malformed JSON header");
  }
  if (!header.is_object()) parse_error(0, "header is not a JSON object");
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!header.contains(key)) parse_error(0, std::string("header lacks '") + key + "'");
    return header[key];
  };
  if (require("magic") != "VFLD1") parse_error(0, "bad magic");
  std::vector<std::int64_t> shape;
  std::vector<double> spacing, origin;
  int dim = 0;
  bool has_mask = false;
  try {
    dim = require("dim").get<int>();
    shape = require("shape").get<std::vector<std::int64_t>>();
    spacing = require("spacing").get<std::vector<double>>();
    origin = require("origin").get<std::vector<double>>();
    has_mask = require("mask").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(0, std::string("header field has the wrong type: ") + e.what());
  }
  if (static_cast<int>(shape.size()) != dim) parse_error(0, "shape length differs from dim");
  std::optional<GridSpec> grid;
  try {
    grid.emplace(shape, spacing, origin);
  } catch (const Error& e) {
    parse_error(0, e.what());
  }
  VfldFile file{*grid, {}, std::nullopt, header.value("provenance", nlohmann::json())};
  std::size_t pos = eol + 1;
  const auto& fields = require("fields");
  if (!fields.is_array()) parse_error(0, "'fields' must be an array");
  for (const auto& f : fields) {
    VfldField field;
    try {
      field.name = f.at("name").get<std::string>();
      field.components = f.at("components").get<int>();
    } catch (const nlohmann::json::exception&) {
      parse_error(0, "field entries need 'name' and 'components'");
    }
    if (field.components < 1) parse_error(0, "field '" + field.name + "' has no components");
    const std::size_t count = grid->size() * static_cast<std::size_t>(field.components);
    const std::size_t need = count * sizeof(double);
    if (bytes.size() < pos + need) parse_error(bytes.size(), "data for field '" + field.name + "' is truncated");
    field.data.resize(count);
    std::memcpy(field.data.data(), bytes.data() + pos, need);
    pos += need;
    file.fields.push_back(std::move(field));
  }
  if (has_mask) {
    if (bytes.size() < pos + grid->size()) parse_error(bytes.size(), "mask is truncated");
    Mask mask(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const auto b = static_cast<unsigned char>(bytes[pos + i]);
      if (b > 1) parse_error(pos + i, "mask bytes must be 0 or 1");
      mask[i] = b;
    }
    pos += grid->size();
    file.mask = std::move(mask);
  }
  if (pos != bytes.size()) parse_error(pos, "trailing bytes after payload");
  return file;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string());
  }
}

VfldFile read_vfld(const std::filesystem::path& path) { return decode_vfld(read_file(path)); }

void write_vfld(const std::filesystem::path& path, const VfldFile& file) {
  write_file_atomic(path, encode_vfld(file));
}

VfldFile to_vfld(const VectorField& u, std::string name, nlohmann::json provenance) {
  const int dim = u.dim();
  VfldField f{std::move(name), dim, std::vector<double>(u.grid().size() * dim)};
  for (std::size_t i = 0; i < u.grid().size(); ++i) {
    for (int k = 0; k < dim; ++k) f.data[i * dim + k] = u.component(k)[i];
  }
  return VfldFile{u.grid(), {std::move(f)}, u.mask(), std::move(provenance)};
}

VfldFile to_vfld(const ScalarField& psi, std::string name, nlohmann::json provenance) {
  VfldField f{std::move(name), 1, {psi.values().begin(), psi.values().end()}};
  return VfldFile{psi.grid(), {std::move(f)}, psi.mask(), std::move(provenance)};
}

namespace {

const VfldField& pick(const VfldFile& file, std::string_view name, int components) {
  for (const auto& f : file.fields) {
    if (name.empty() ? f.components == components : f.name == name) {
      if (f.components != components) {
        throw Error(ErrorKind::Precondition, "field '" + f.name + "' has " + std::to_string(f.components) +
                                                 " components, expected " + std::to_string(components));
      }
      return f;
    }
  }
  throw Error(ErrorKind::Precondition, name.empty() ? "no field with " + std::to_string(components) + " components"
                                                    : "no field named '" + std::string(name) + "'");
}

}  // namespace

VectorField vector_field(const VfldFile& file, std::string_view name) {
  const int dim = file.grid.dim();
  const auto& f = pick(file, name, dim);
  std::vector<std::vector<double>> comps(dim, std::vector<double>(file.grid.size()));
  for (std::size_t i = 0; i < file.grid.size(); ++i) {
    for (int k = 0; k < dim; ++k) comps[k][i] = f.data[i * dim + k];
  }
  return VectorField(file.grid, std::move(comps), file.mask.value_or(Mask{}));
}

ScalarField scalar_field(const VfldFile& file, std::string_view name) {
  const auto& f = pick(file, name, 1);
  return ScalarField(file.grid, f.data, file.mask.value_or(Mask{}));
}

}  // namespace eikinetic
