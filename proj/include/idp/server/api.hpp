#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "idp/editor/editor.hpp"
#include "idp/engine/limits.hpp"
#include "idp/server/config.hpp"
#include "idp/server/filesystem.hpp"
#include "idp/server/tutorials.hpp"
#include "idp/share/share.hpp"

namespace idp::server {

struct HttpRequest {
  std::string method;
  std::string target;  // path plus optional query
  std::string body;
  std::string host;    // Host header, for share links
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// The REST endpoints and static assets, independent of the transport.
/// Handlers are safe to call concurrently.
class Api {
 public:
  /// `share` may be null, in which case sharing answers 503.
  Api(ServerConfig config, FileSystem& fs, std::unique_ptr<share::Backend> share);

  HttpResponse handle(const HttpRequest& request) const;

  const ServerConfig& config() const { return config_; }

  /// Makes running and future inferences stop early (server shutdown).
  void cancel() { cancel_.request_stop(engine::StopReason::killed); }

 private:
  HttpResponse files(const HttpRequest& r) const;
  HttpResponse file_get(const std::map<std::string, std::string>& query) const;
  HttpResponse file_put(const HttpRequest& r) const;
  HttpResponse check(const HttpRequest& r) const;
  HttpResponse inference(const HttpRequest& r) const;
  HttpResponse tokens(const HttpRequest& r) const;
  HttpResponse symbols(const HttpRequest& r) const;
  HttpResponse indent(const HttpRequest& r) const;
  HttpResponse complete(const HttpRequest& r) const;
  HttpResponse snippets() const;
  HttpResponse share_create(const HttpRequest& r) const;
  HttpResponse share_fetch(const std::string& id) const;
  HttpResponse tutorials(const std::string& id) const;
  HttpResponse static_file(const std::string& path) const;

  std::vector<editor::Snippet> all_snippets() const;

  ServerConfig config_;
  FileSystem& fs_;
  std::unique_ptr<share::Backend> share_;
  std::vector<TutorialBundle> tutorials_;
  engine::StopSource cancel_;
};

/// Splits `a=b&c=d` with percent-decoding.
std::map<std::string, std::string> parse_query(std::string_view query);

}  // namespace idp::server
