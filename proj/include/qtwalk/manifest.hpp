#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace qtwalk {

// Provenance record stored next to an artifact as `<artifact>.manifest`:
// one `key=value` line per entry, sorted by key.
using Manifest = std::map<std::string, std::string>;

std::filesystem::path manifest_path(const std::filesystem::path& artifact);
std::string serialize_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& artifact, const Manifest& m);
// Empty when the artifact has no manifest.
Manifest read_manifest(const std::filesystem::path& artifact);

}  // namespace qtwalk
