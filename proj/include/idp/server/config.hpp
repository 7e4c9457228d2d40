#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "idp/run/session.hpp"

namespace idp::server {

enum class Mode { local, online };

const char* to_string(Mode mode);

struct ShareConfig {
  enum class Backend { local, external } backend = Backend::local;
  std::string base_url;
  std::string token_env;  // environment variable holding the API token
};

struct ServerConfig {
  std::filesystem::path workspace = "workspace";
  Mode mode = Mode::local;
  std::string bind_address = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  run::ResourceLimits limits = run::ResourceLimits::local();
  ShareConfig share;
  std::filesystem::path web_root = "web";
  std::filesystem::path tutorials = "tutorials";
  std::size_t max_payload_bytes = 1 << 20;
  std::string public_url;  // origin used in share links; empty means the request's Host
  int threads = 4;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads environment variables from the process.
std::optional<std::string> process_env(const std::string& name);

/// Parses an `ide.json` document. Relative paths are taken relative to
/// `base_dir`. IDP_IDE_PORT and IDP_IDE_MODE from `env` override the file.
/// Throws std::invalid_argument with a readable message for bad settings.
ServerConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                          const EnvLookup& env = process_env);

/// As parse_config on the file's contents; a missing file yields the
/// defaults (plus environment overrides) relative to its directory.
ServerConfig load_config(const std::filesystem::path& file, const EnvLookup& env = process_env);

}  // namespace idp::server
