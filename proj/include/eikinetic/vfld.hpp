#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eikinetic/grid.hpp"

namespace eikinetic {

struct VfldField {
  std::string name;
  int components = 1;
  /// Node-major, components interleaved.
  std::vector<double> data;
};

struct VfldFile {
  GridSpec grid;
  std::vector<VfldField> fields;
  std::optional<Mask> mask;
  nlohmann::json provenance;
};

std::string encode_vfld(const VfldFile& file);
/// Throws Parse with the byte offset of the first problem.
VfldFile decode_vfld(std::string_view bytes);

VfldFile read_vfld(const std::filesystem::path& path);
void write_vfld(const std::filesystem::path& path, const VfldFile& file);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

VfldFile to_vfld(const VectorField& u, std::string name = "u", nlohmann::json provenance = nullptr);
VfldFile to_vfld(const ScalarField& psi, std::string name = "psi", nlohmann::json provenance = nullptr);

/// The named field, or the first field with the matching component count.
VectorField vector_field(const VfldFile& file, std::string_view name = {});
ScalarField scalar_field(const VfldFile& file, std::string_view name = {});

}  // namespace eikinetic
