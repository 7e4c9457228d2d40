#include "idp/server/server.hpp"

#include <array>
#include <deque>
#include <future>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "idp/server/wire.hpp"

namespace idp::server {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

std::unique_ptr<share::Backend> make_share_backend(const ServerConfig& config, const EnvLookup& env) {
  if (config.share.backend == ShareConfig::Backend::external) {
    std::string token;
    if (!config.share.token_env.empty()) token = env(config.share.token_env).value_or("");
    return std::make_unique<share::ExternalStore>(config.share.base_url, token);
  }
  return std::make_unique<share::LocalStore>(config.workspace / "shares");
}

struct Server::Impl {
  Impl(ServerConfig config, FileSystem& fs, std::unique_ptr<share::Backend> share)
      : api(std::move(config), fs, std::move(share)),
        ioc(std::make_unique<net::io_context>()),
        acceptor(std::make_unique<tcp::acceptor>(net::make_strand(*ioc))),
        pool(static_cast<std::size_t>(std::max(1, api.config().threads))) {}

  Api api;
  run::SessionRegistry registry;
  // Reset by stop(): destroying the context closes every connection.
  std::unique_ptr<net::io_context> ioc;
  std::unique_ptr<tcp::acceptor> acceptor;
  unsigned short port = 0;
  net::thread_pool pool;
  std::vector<std::thread> threads;
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopping = false;
  bool stopped = false;
  bool started = false;

  void accept();
};

namespace {

// ---------------------------------------------------------------------------
// WebSocket sessions

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Server::Impl& server) : ws_(std::move(socket)), server_(server) {}

  ~WsSession() {
    if (!run_id_.empty()) server_.registry.remove(run_id_);
  }

  void accept(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(server_.api.config().max_payload_bytes);
    ws_.async_accept(request, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      // Disconnect: the run must not outlive its client.
      if (!run_id_.empty()) server_.registry.remove(run_id_);
      return;
    }
    if (!ws_.got_text()) return violation("binary frames are not supported");
    const auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::parse_error&) {
      return violation("messages must be JSON objects");
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      return violation("messages need a string \"type\"");
    }
    const auto type = msg["type"].get<std::string>();
    if (type == "start") {
      if (started_) return violation("only one start per connection");
      started_ = true;
      run::RunRequest request;
      try {
        const auto mode = msg.value("mode", std::string("main"));
        if (mode != "main" && mode != "shell") throw std::invalid_argument("mode must be main or shell");
        request.mode = mode == "main" ? run::Mode::main : run::Mode::shell;
        request.files = files_from_json(msg.at("files"));
        request.entry = msg.value("entry", std::string("main"));
      } catch (const std::exception& e) {
        return violation(std::string("bad start message: ") + e.what());
      }
      request.limits = server_.api.config().limits;
      std::weak_ptr<WsSession> weak = shared_from_this();
      auto executor = ws_.get_executor();
      auto sink = [weak, executor](const run::Event& e) {
        auto text = to_json(e).dump();
        const bool last = e.kind == run::EventKind::exit;
        net::post(executor, [weak, text = std::move(text), last]() mutable {
          if (auto self = weak.lock()) self->send(std::move(text), last);
        });
      };
      try {
        run_id_ = server_.registry.start(std::move(request), std::move(sink));
      } catch (const std::runtime_error&) {
        return close(websocket::close_code::going_away, "server is shutting down");
      }
    } else if (type == "stdin" || type == "click" || type == "kill") {
      if (!started_) return violation(type + " before start");
      auto run = server_.registry.find(run_id_);
      if (type == "stdin") {
        if (!msg.contains("data") || !msg["data"].is_string()) return violation("stdin needs string data");
        if (run) run->send_input(msg["data"].get<std::string>());
      } else if (type == "click") {
        if (!msg.contains("x") || !msg.contains("y") || !msg["x"].is_number_integer() ||
            !msg["y"].is_number_integer()) {
          return violation("click needs integer x and y");
        }
        if (run) run->send_click(msg["x"].get<int>(), msg["y"].get<int>());
      } else if (run) {
        run->kill();
      }
    } else {
      return violation("unknown message type " + type);
    }
    read();
  }

  void send(std::string text, bool last) {
    if (close_code_) return;
    queue_.push_back(std::move(text));
    if (last) close_code_ = websocket::close_code::normal;
    flush();
  }

  // One write at a time, the close frame after everything queued before it.
  void flush() {
    if (writing_) return;
    if (!queue_.empty()) {
      writing_ = true;
      ws_.text(true);
      ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
      return;
    }
    if (close_code_ && !close_sent_) {
      close_sent_ = true;
      websocket::close_reason why(*close_code_, close_reason_);
      ws_.async_close(why, [self = shared_from_this()](beast::error_code) {});
    }
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    queue_.pop_front();
    if (ec) return;
    flush();
  }

  void violation(const std::string& reason) {
    spdlog::info("websocket protocol error: {}", reason);
    if (!run_id_.empty()) server_.registry.remove(run_id_);
    // Keep only the message being written.
    if (queue_.size() > 1) queue_.erase(queue_.begin() + (writing_ ? 1 : 0), queue_.end());
    if (!writing_) queue_.clear();
    close(websocket::close_code::protocol_error, reason);
  }

  void close(websocket::close_code code, const std::string& reason) {
    if (close_code_) return;
    close_code_ = code;
    // Close reasons are limited to 123 bytes by the protocol.
    close_reason_ = reason.substr(0, 120);
    flush();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  std::optional<websocket::close_code> close_code_;
  std::string close_reason_;
  bool close_sent_ = false;
  bool started_ = false;
  std::string run_id_;
};

// ---------------------------------------------------------------------------
// HTTP

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server::Impl& server) : stream_(std::move(socket)), server_(server) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this()));
  }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(server_.api.config().max_payload_bytes);
    parser_->header_limit(64 * 1024);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return shutdown();
    if (ec == http::error::body_limit) {
      HttpResponse too_large{413, "application/json", R"({"error":"payload too large"})"};
      return write(too_large, parser_->get().version(), false);
    }
    if (ec) return;
    auto request = parser_->release();
    if (websocket::is_upgrade(request)) {
      if (request.target() == "/ws/session") {
        std::make_shared<WsSession>(stream_.release_socket(), server_)->accept(std::move(request));
        return;
      }
      HttpResponse not_found{404, "application/json", R"({"error":"no such endpoint"})"};
      return write(not_found, request.version(), false);
    }
    HttpRequest r{std::string(request.method_string()), std::string(request.target()), std::move(request.body()),
                  std::string(request[http::field::host])};
    const auto version = request.version();
    const bool keep_alive = request.keep_alive();
    const bool head = request.method() == http::verb::head;
    // Inferences can be slow; answer on the worker pool.
    net::post(server_.pool, [self = shared_from_this(), r = std::move(r), version, keep_alive, head]() mutable {
      auto response = self->server_.api.handle(r);
      if (head) response.body.clear();
      net::post(self->stream_.get_executor(), [self, response = std::move(response), version, keep_alive]() {
        self->write(response, version, keep_alive);
      });
    });
  }

  void write(const HttpResponse& r, unsigned version, bool keep_alive) {
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status), version);
    res->set(http::field::server, "idp-ide");
    res->set(http::field::content_type, r.content_type);
    res->keep_alive(keep_alive);
    res->body() = r.body;
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res, keep_alive](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!keep_alive) return self->shutdown();
      self->read();
    });
  }

  // Half-closes, then discards whatever the client still sends (such as the
  // rest of a rejected body) so that it sees the response and not a reset.
  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    stream_.expires_after(std::chrono::seconds(5));
    drain();
  }

  void drain() {
    stream_.async_read_some(net::buffer(drain_buffer_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->drain();
    });
  }

  beast::tcp_stream stream_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::array<char, 16 * 1024> drain_buffer_;
};

}  // namespace

void Server::Impl::accept() {
  acceptor->async_accept(net::make_strand(*ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

Server::Server(ServerConfig config, FileSystem& fs, std::unique_ptr<share::Backend> share)
    : impl_(std::make_unique<Impl>(std::move(config), fs, std::move(share))) {}

Server::~Server() { stop(); }

void Server::start() {
  const auto& c = impl_->api.config();
  const tcp::endpoint endpoint(net::ip::make_address(c.bind_address), static_cast<unsigned short>(c.port));
  auto& acceptor = *impl_->acceptor;
  acceptor.open(endpoint.protocol());
  acceptor.set_option(net::socket_base::reuse_address(true));
  acceptor.bind(endpoint);
  acceptor.listen(net::socket_base::max_listen_connections);
  impl_->port = acceptor.local_endpoint().port();
  impl_->started = true;
  impl_->accept();
  const int n = std::max(2, c.threads);
  for (int i = 0; i < n; ++i) impl_->threads.emplace_back([this] { impl_->ioc->run(); });
  spdlog::info("listening on {}:{} ({} mode)", c.bind_address, port(), to_string(c.mode));
}

void Server::stop() {
  {
    std::unique_lock lock(impl_->mutex);
    if (impl_->stopping) {
      impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
      return;
    }
    impl_->stopping = true;
  }
  if (impl_->started) {
    std::promise<void> closed;
    net::post(impl_->acceptor->get_executor(), [this, &closed] {
      beast::error_code ec;
      impl_->acceptor->close(ec);
      closed.set_value();
    });
    closed.get_future().wait();
  }
  // Runs and inferences end first, so that nothing posts into a stopped
  // io_context afterwards.
  impl_->registry.shutdown();
  impl_->api.cancel();
  impl_->ioc->stop();
  for (auto& t : impl_->threads) t.join();
  impl_->threads.clear();
  impl_->pool.join();
  impl_->acceptor.reset();
  impl_->ioc.reset();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

void Server::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

unsigned short Server::port() const { return impl_->port; }

run::SessionRegistry& Server::registry() { return impl_->registry; }

const Api& Server::api() const { return impl_->api; }

}  // namespace idp::server
