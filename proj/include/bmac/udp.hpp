// Copyright 2026 The BMac Peer Authors
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

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bmac/bytes.hpp"

namespace bmac {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Accepts "host:port" or ":port" (any address).
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

struct Datagram {
  Bytes bytes;
  std::uint16_t dst_port = 0;
};

/// IPv4 UDP socket.
class UdpSocket {
 public:
  UdpSocket();
  ~UdpSocket();
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  void bind(const Endpoint& local);
  std::uint16_t local_port() const;
  /// Best effort; the kernel may clamp the size.
  void set_receive_buffer(int bytes);
  void send_to(ByteView data, const Endpoint& dest);
  /// Returns nullopt on timeout.
  std::optional<Datagram> receive(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::uint16_t bound_port_ = 0;
};

}  // namespace bmac
