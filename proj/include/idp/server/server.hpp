#pragma once

#include <memory>

#include "idp/run/session.hpp"
#include "idp/server/api.hpp"
#include "idp/server/config.hpp"
#include "idp/server/filesystem.hpp"
#include "idp/share/share.hpp"

namespace idp::server {

/// Share backend selected by the configuration: the JSON store under
/// `<workspace>/shares`, or the external service with its token read from
/// the configured environment variable.
std::unique_ptr<share::Backend> make_share_backend(const ServerConfig& config, const EnvLookup& env = process_env);

/// HTTP + WebSocket front end on one port. REST requests are answered on a
/// worker pool so that long inferences never stall the accept loop;
/// `/ws/session` connections drive runs from the session registry.
class Server {
 public:
  Server(ServerConfig config, FileSystem& fs, std::unique_ptr<share::Backend> share);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, listens and starts the I/O threads. Throws on bind failure.
  void start();
  /// Stops accepting, kills all runs and joins the threads. Idempotent.
  void stop();
  /// Blocks until a stop() (e.g. from a signal handler) has completed.
  void wait();

  unsigned short port() const;
  run::SessionRegistry& registry();
  const Api& api() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace idp::server
