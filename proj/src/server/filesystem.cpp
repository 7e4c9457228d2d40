#include "idp/server/filesystem.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace idp::server {

namespace fs = std::filesystem;

std::vector<std::string> RealFileSystem::list(const fs::path& root) const {
  std::vector<std::string> out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  for (; !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    const auto name = it->path().filename().string();
    if (!name.empty() && name[0] == '.') {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file()) out.push_back(fs::relative(it->path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> RealFileSystem::read(const fs::path& file) const {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return std::nullopt;
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool RealFileSystem::is_directory(const fs::path& path) const {
  std::error_code ec;
  return fs::is_directory(path, ec);
}

void RealFileSystem::write_atomic(const fs::path& file, const std::string& content) {
  fs::create_directories(file.parent_path());
  std::random_device rd;
  const auto temp = file.parent_path() / ("." + file.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(temp, std::ios::binary);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw std::runtime_error("cannot write " + file.string());
    }
  }
  fs::rename(temp, file);
}

std::optional<fs::path> resolve_inside(const fs::path& root, const std::string& relative) {
  if (relative.empty() || relative.find('\0') != std::string::npos || relative.find('\\') != std::string::npos) {
    return std::nullopt;
  }
  const fs::path rel(relative);
  if (rel.is_absolute() || rel.has_root_name() || rel.has_root_directory()) return std::nullopt;
  // Split by hand: path iteration folds "a//b" into "a/b".
  for (std::size_t start = 0;;) {
    const auto slash = relative.find('/', start);
    const auto part = std::string_view(relative).substr(start, slash - start);
    if (part.empty() || part == "." || part == "..") return std::nullopt;
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  // Symlinks inside the workspace must not lead out of it.
  std::error_code ec;
  const auto base = fs::weakly_canonical(root, ec);
  if (ec) return std::nullopt;
  const auto full = fs::weakly_canonical(base / rel, ec);
  if (ec) return std::nullopt;
  const auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) return std::nullopt;
  return full;
}

}  // namespace idp::server
