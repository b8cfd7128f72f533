#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <memory>

#include "viia/service.hpp"

namespace viia::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

// Frames queued beyond this stall an agent-paced loop until the socket drains.
constexpr std::size_t kMaxBacklog = 256;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, SessionRegistry& registry)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        connection_(registry, [this](const Json& j) { send(j.dump()); }) {}

  void run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      self->connection_.on_text(beast::buffers_to_string(self->buffer_.data()), false);
      self->buffer_.consume(self->buffer_.size());
      self->schedule();
      self->read();
    });
  }

  void schedule() {
    if (closed_ || scheduled_ || stalled_) return;
    auto* session = connection_.session();
    if (!session || !session->wants_tick()) return;
    scheduled_ = true;
    if (session->mode() == sim::DriveMode::human_driven) {
      const auto now = std::chrono::steady_clock::now();
      const auto period = std::chrono::milliseconds(kTickPeriodMs);
      if (next_tick_ + period < now) next_tick_ = now;
      next_tick_ += period;
      timer_.expires_at(next_tick_);
      timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
        self->scheduled_ = false;
        if (!ec) self->step();
      });
    } else {
      asio::post(ws_.get_executor(), [self = shared_from_this()] {
        self->scheduled_ = false;
        self->step();
      });
    }
  }

  void step() {
    if (closed_) return;
    auto* session = connection_.session();
    if (!session || !session->wants_tick()) return;
    if (outbox_.size() >= kMaxBacklog) {
      stalled_ = true;
      return;
    }
    connection_.tick();
    schedule();
  }

  void send(std::string text) {
    if (closed_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
      if (self->stalled_ && self->outbox_.size() < kMaxBacklog / 2) {
        self->stalled_ = false;
        self->schedule();
      }
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  asio::steady_timer timer_;
  Connection connection_;
  std::deque<std::string> outbox_;
  std::chrono::steady_clock::time_point next_tick_ = std::chrono::steady_clock::now();
  bool scheduled_ = false;
  bool stalled_ = false;
  bool closed_ = false;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions opts) : options(std::move(opts)), acceptor(ioc) {
    const tcp::endpoint endpoint(asio::ip::make_address(options.address), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen(asio::socket_base::max_listen_connections);
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<WsSession>(std::move(socket), registry)->run();
      accept();
    });
  }

  ServerOptions options;
  SessionRegistry registry;  // outlives the io_context and its pending handlers
  asio::io_context ioc{1};
  tcp::acceptor acceptor;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

void Server::run() {
  impl_->accept();
  if (impl_->options.on_listen) impl_->options.on_listen(impl_->acceptor.local_endpoint().port());
  impl_->ioc.run();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace viia::service
