#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace idp::server {

/// File access used by the server, so tests can observe and forbid writes.
class FileSystem {
 public:
  virtual ~FileSystem() = default;
  /// Regular files below `root` as '/'-separated relative paths, sorted.
  /// Hidden entries (starting with '.') are skipped.
  virtual std::vector<std::string> list(const std::filesystem::path& root) const = 0;
  virtual std::optional<std::string> read(const std::filesystem::path& file) const = 0;
  virtual bool is_directory(const std::filesystem::path& path) const = 0;
  /// Writes through a temporary file and a rename; creates parent directories.
  virtual void write_atomic(const std::filesystem::path& file, const std::string& content) = 0;
};

class RealFileSystem : public FileSystem {
 public:
  std::vector<std::string> list(const std::filesystem::path& root) const override;
  std::optional<std::string> read(const std::filesystem::path& file) const override;
  bool is_directory(const std::filesystem::path& path) const override;
  void write_atomic(const std::filesystem::path& file, const std::string& content) override;
};

/// Checks a client-supplied relative path. Returns the absolute location
/// inside `root`, or std::nullopt for absolute paths, `..` components, empty
/// components, backslashes, NUL bytes, or symlinks leading outside `root`.
std::optional<std::filesystem::path> resolve_inside(const std::filesystem::path& root, const std::string& relative);

}  // namespace idp::server
