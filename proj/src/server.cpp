#include "touchsim/server.hpp"

#include <sys/socket.h>

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>

#include "touchsim/protocol.hpp"

namespace touchsim {

namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

// Longest request line accepted before the connection is dropped.
constexpr std::size_t kMaxLineBytes = 1 << 20;

struct Connection {
  explicit Connection(tcp::socket s) : socket(std::move(s)) {}
  tcp::socket socket;
  std::thread thread;
  std::atomic<bool> done{false};
};

// The socket is only shut down here; it is closed when the server reaps the
// connection, so stop() can always reach a valid descriptor.
void serve_connection(Connection& conn, std::shared_ptr<const Dataset> dataset) {
  tcp::socket& socket = conn.socket;
  Session session(std::move(dataset));
  asio::streambuf buffer(kMaxLineBytes);
  boost::system::error_code ec;
  while (!session.closed()) {
    const std::size_t n = asio::read_until(socket, buffer, '\n', ec);
    if (ec) break;  // EOF, shutdown, or an overlong line
    std::string line(asio::buffers_begin(buffer.data()),
                     asio::buffers_begin(buffer.data()) + static_cast<std::ptrdiff_t>(n - 1));
    buffer.consume(n);
    const std::string response = session.handle_line(line) + "\n";
    asio::write(socket, asio::buffer(response), ec);
    if (ec) break;
  }
  socket.shutdown(tcp::socket::shutdown_both, ec);
  conn.done = true;
}

}  // namespace

struct Server::Impl {
  std::shared_ptr<const Dataset> dataset;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::mutex mutex;
  bool stopping = false;
  std::uint16_t port = 0;
  std::list<Connection> connections;

  void reap_finished() {
    for (auto it = connections.begin(); it != connections.end();) {
      if (it->done) {
        it->thread.join();
        it = connections.erase(it);
      } else {
        ++it;
      }
    }
  }

  void join_all() {
    for (auto& c : connections) {
      if (c.thread.joinable()) c.thread.join();
    }
  }

  void accept_next() {
    acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::lock_guard lock(mutex);
      if (stopping) return;
      reap_finished();
      auto& conn = connections.emplace_back(std::move(socket));
      conn.thread = std::thread(serve_connection, std::ref(conn), dataset);
      accept_next();
    });
  }
};

Server::Server(std::shared_ptr<const Dataset> dataset, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->dataset = std::move(dataset);
  try {
    const tcp::endpoint endpoint(asio::ip::make_address(options.host), options.port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
    impl_->port = impl_->acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw std::runtime_error("cannot listen on " + options.host + ":" + std::to_string(options.port) +
                             ": " + e.code().message());
  }
}

Server::~Server() {
  stop();
  impl_->join_all();
}

std::uint16_t Server::port() const { return impl_->port; }

void Server::run() {
  impl_->accept_next();
  impl_->io.run();
  impl_->join_all();
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopping) return;
    impl_->stopping = true;
    // Wake blocked readers so their handlers return.
    for (auto& c : impl_->connections) ::shutdown(c.socket.native_handle(), SHUT_RDWR);
  }
  asio::post(impl_->io, [this] {
    boost::system::error_code ec;
    impl_->acceptor.close(ec);
  });
}

}  // namespace touchsim
