// Copyright 2026 The IDRL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "idrl/service/server.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "idrl/errors.hpp"

namespace idrl::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::string_view mime_type(const std::filesystem::path& path) noexcept {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

namespace {

class WsConnection : public ConsoleSink, public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket&& socket, Session& session) : ws_(std::move(socket)), session_(session) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

  void send(std::string text) override {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    if (!session_.attach(shared_from_this())) {
      rejected_ = true;
      queue_.push_back(serialize(RejectMessage{"another console is already attached", std::nullopt}));
      write_next();
      return;
    }
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      session_.detach(this);
      return;
    }
    session_.on_console_message(this, beast::buffers_to_string(buffer_.data()));
    buffer_.consume(buffer_.size());
    read_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      session_.detach(this);
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      write_next();
    } else if (rejected_) {
      ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  Session& session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool rejected_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Session& session, const ServerConfig& config,
                 std::function<void(std::shared_ptr<WsConnection>)> on_ws)
      : stream_(std::move(socket)), session_(session), config_(config), on_ws_(std::move(on_ws)) {}

  void start() { read_next(); }

 private:
  void read_next() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    const std::string target(req_.target());
    if (websocket::is_upgrade(req_)) {
      if (target == "/ws") {
        stream_.expires_never();
        auto ws = std::make_shared<WsConnection>(stream_.release_socket(), session_);
        on_ws_(ws);
        ws->start(std::move(req_));
        return;
      }
    }
    respond(handle(target));
  }

  http::response<http::string_body> make(http::status status, std::string body, std::string_view type) {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::server, "idrl");
    res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res.set(http::field::cache_control, "no-store");
    res.keep_alive(req_.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  http::response<http::string_body> handle(std::string target) {
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      return make(http::status::method_not_allowed, "method not allowed\n", "text/plain");
    }
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target == "/health") {
      const SessionSnapshot s = session_.snapshot();
      nlohmann::json j = {{"status", "ok"},
                          {"session", s.id},
                          {"phase", to_string(s.phase)},
                          {"console_attached", s.console_attached},
                          {"step", s.step},
                          {"budget_remaining", s.budget_remaining}};
      return make(http::status::ok, j.dump() + "\n", "application/json");
    }
    if (target == "/ws") return make(http::status::upgrade_required, "websocket upgrade required\n", "text/plain");
    if (config_.static_dir.empty() || target.empty() || target.front() != '/' ||
        target.find("..") != std::string::npos || target.find('\\') != std::string::npos) {
      return make(http::status::not_found, "not found\n", "text/plain");
    }
    std::filesystem::path rel = target == "/" ? "index.html" : target.substr(1);
    const std::filesystem::path file = config_.static_dir / rel;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec)) return make(http::status::not_found, "not found\n", "text/plain");
    std::ifstream in(file, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    auto res = make(http::status::ok, body.str(), mime_type(file));
    if (req_.method() == http::verb::head) res.body().clear();
    return res;
  }

  void respond(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!sp->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read_next();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Session& session_;
  const ServerConfig& config_;
  std::function<void(std::shared_ptr<WsConnection>)> on_ws_;
};

}  // namespace

struct Server::Impl {
  Impl(Session& s, ServerConfig c) : session(s), config(std::move(c)), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpConnection>(std::move(socket), session, config, [this](std::shared_ptr<WsConnection> ws) {
        std::lock_guard lock(mu);
        consoles.push_back(ws);
      })->start();
      accept();
    });
  }

  Session& session;
  ServerConfig config;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  std::thread thread;
  std::uint16_t bound_port = 0;
  std::mutex mu;
  std::vector<std::weak_ptr<WsConnection>> consoles;
  bool running = false;
};

Server::Server(Session& session, ServerConfig config) : impl_(std::make_unique<Impl>(session, std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->running) return;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->config.address, ec);
  if (ec) throw Error("bad listen address '" + impl_->config.address + "'");
  const tcp::endpoint ep{address, impl_->config.port};
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + impl_->config.address + ":" + std::to_string(impl_->config.port) + ": " +
                      ec.message());
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
  impl_->accept();
  impl_->running = true;
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_ || !impl_->running) return;
  impl_->running = false;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  {
    std::lock_guard lock(impl_->mu);
    for (auto& w : impl_->consoles) {
      if (auto ws = w.lock()) ws->close();
    }
  }
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  // The session may still hold a connection; release it before the I/O context goes away.
  std::lock_guard lock(impl_->mu);
  for (auto& w : impl_->consoles) {
    if (auto ws = w.lock()) impl_->session.detach(ws.get());
  }
  impl_->consoles.clear();
}

std::uint16_t Server::port() const noexcept { return impl_->bound_port; }

}  // namespace idrl::service
