#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "touchsim/dataset.hpp"

namespace touchsim {

inline constexpr std::uint16_t kDefaultPort = 7878;

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 picks a free port
};

// JSON-lines environment server. Each connection gets its own Session on its
// own thread; the dataset is shared read-only.
class Server {
 public:
  // Binds and listens immediately; throws std::runtime_error if the address
  // is unavailable.
  Server(std::shared_ptr<const Dataset> dataset, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;

  // Accepts connections until stop(); joins all connection threads on exit.
  void run();
  // Safe to call from any thread, including signal-watching ones.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace touchsim
