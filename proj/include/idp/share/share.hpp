#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace idp::share {

struct File {
  std::string name;
  std::string content;
  friend bool operator==(const File&, const File&) = default;
};

struct ShareRecord {
  std::string id;
  std::int64_t created_at = 0;  // seconds since the Unix epoch
  std::vector<File> files;
};

inline constexpr std::size_t kMaxShareBytes = 256 * 1024;
inline constexpr std::size_t kIdLength = 8;

enum class ErrorKind { empty, too_large, not_found, upstream };

class ShareError : public std::runtime_error {
 public:
  ShareError(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Fresh 8-character base36 id from the kernel's secure generator.
std::string generate_id();
bool is_valid_id(std::string_view id);

/// Sum of name and content sizes; throws ShareError for an empty file list
/// or a total above kMaxShareBytes.
void validate(const std::vector<File>& files);

class Backend {
 public:
  virtual ~Backend() = default;
  /// Stores the files under a new id; records are immutable.
  virtual std::string create(const std::vector<File>& files) = 0;
  virtual ShareRecord fetch(const std::string& id) = 0;
};

/// One JSON document per record in `directory`, written to a temporary file
/// and linked into place so readers never see partial records and ids never
/// collide.
class LocalStore : public Backend {
 public:
  explicit LocalStore(std::filesystem::path directory);
  std::string create(const std::vector<File>& files) override;
  ShareRecord fetch(const std::string& id) override;

 private:
  std::filesystem::path directory_;
};

/// Client for a paste service: `POST <base_url>` with {files} answers {id};
/// `GET <base_url>/<id>` answers {files}. Any transport failure or
/// unexpected answer is an `upstream` error; 404 on fetch is `not_found`.
class ExternalStore : public Backend {
 public:
  ExternalStore(std::string base_url, std::string token);
  std::string create(const std::vector<File>& files) override;
  ShareRecord fetch(const std::string& id) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // without trailing slash
  std::string token_;
};

}  // namespace idp::share
