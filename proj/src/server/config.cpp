#include "idp/server/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace idp::server {

using nlohmann::json;

const char* to_string(Mode mode) { return mode == Mode::local ? "local" : "online"; }

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace {

Mode parse_mode(const std::string& s) {
  if (s == "local") return Mode::local;
  if (s == "online") return Mode::online;
  throw std::invalid_argument("mode must be \"local\" or \"online\", not \"" + s + "\"");
}

int parse_port(const std::string& s) {
  int port = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("port must be a number: " + s);
  return port;
}

template <typename T>
void read_positive(const json& limits, const char* key, T& target) {
  if (!limits.contains(key)) return;
  const auto v = limits.at(key).get<std::int64_t>();
  if (v <= 0) throw std::invalid_argument(std::string("limits.") + key + " must be positive");
  target = static_cast<T>(v);
}

}  // namespace

ServerConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir, const EnvLookup& env) {
  json doc;
  try {
    doc = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("ide.json: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("ide.json must contain an object");

  ServerConfig c;
  try {
    auto path = [&](const char* key, std::filesystem::path& target) {
      if (doc.contains(key)) target = doc.at(key).get<std::string>();
      if (target.is_relative()) target = base_dir / target;
    };
    path("workspace", c.workspace);
    path("web_root", c.web_root);
    path("tutorials", c.tutorials);
    if (doc.contains("mode")) c.mode = parse_mode(doc.at("mode").get<std::string>());
    if (auto m = env("IDP_IDE_MODE")) c.mode = parse_mode(*m);
    if (doc.contains("port")) c.port = doc.at("port").get<int>();
    if (auto p = env("IDP_IDE_PORT")) c.port = parse_port(*p);
    if (doc.contains("bind")) {
      c.bind_address = doc.at("bind").get<std::string>();
    } else if (c.mode == Mode::online) {
      throw std::invalid_argument("online mode needs an explicit \"bind\" address");
    }
    if (doc.contains("public_url")) c.public_url = doc.at("public_url").get<std::string>();
    if (doc.contains("max_payload_bytes")) c.max_payload_bytes = doc.at("max_payload_bytes").get<std::size_t>();
    if (doc.contains("threads")) c.threads = std::max(1, doc.at("threads").get<int>());

    c.limits = c.mode == Mode::online ? run::ResourceLimits::online() : run::ResourceLimits::local();
    if (doc.contains("limits")) {
      const auto& l = doc.at("limits");
      read_positive(l, "wall_ms", c.limits.wall_ms);
      read_positive(l, "output_bytes_max", c.limits.output_bytes_max);
      read_positive(l, "max_models", c.limits.max_models);
      read_positive(l, "ground_atoms_max", c.limits.ground_atoms_max);
      read_positive(l, "max_decisions", c.limits.max_decisions);
    }

    if (doc.contains("share")) {
      const auto& s = doc.at("share");
      const auto backend = s.value("backend", std::string("local"));
      if (backend == "external") {
        c.share.backend = ShareConfig::Backend::external;
        c.share.base_url = s.at("base_url").get<std::string>();
        c.share.token_env = s.value("token_env", std::string());
      } else if (backend != "local") {
        throw std::invalid_argument("share.backend must be \"local\" or \"external\"");
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("ide.json: ") + e.what());
  }

  if (c.port < 0 || c.port > 65535) throw std::invalid_argument("port must be in 0-65535 (0 picks a free port)");
  std::error_code ec;
  if (!std::filesystem::is_directory(c.workspace, ec)) {
    throw std::invalid_argument("workspace " + c.workspace.string() + " is not a readable directory");
  }
  return c;
}

ServerConfig load_config(const std::filesystem::path& file, const EnvLookup& env) {
  std::ifstream in(file);
  std::string text;
  if (in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  const auto dir = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
  return parse_config(text, dir, env);
}

}  // namespace idp::server
