#include "qtwalk/manifest.hpp"

#include <fstream>
#include <sstream>

#include "qtwalk/errors.hpp"

namespace qtwalk {

std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".manifest";
  return p;
}

std::string serialize_manifest(const Manifest& m) {
  std::string out;
  for (const auto& [key, value] : m) {
    if (key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw FormatError("manifest entry cannot contain '=' in the key or a newline");
    }
    out += key + "=" + value + "\n";
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": missing '='");
    }
    m[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  return m;
}

void write_manifest(const std::filesystem::path& artifact, const Manifest& m) {
  const auto path = manifest_path(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_manifest(m);
}

Manifest read_manifest(const std::filesystem::path& artifact) {
  std::ifstream in(manifest_path(artifact), std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace qtwalk
