// Copyright 2026 The Situ Authors
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

// Live session endpoint: a wall-clock paced tick loop publishing state
// messages over a websocket. Requires Boost.Beast; kept out of situ.hpp.

#ifndef SITU__STREAM_SERVER_HPP_
#define SITU__STREAM_SERVER_HPP_

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "situ/session.hpp"

namespace situ
{

struct StreamOptions
{
  std::string host{"127.0.0.1"};
  int port{8765};             // 0 picks a free port
  double time_scale{1.0};     // >1 runs faster than wall clock
  std::string static_dir;     // optional UI bundle served over plain HTTP
};

namespace stream
{

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Message = std::shared_ptr<const std::string>;

struct GazeCommand
{
  Vec3 direction;
};

enum class Control { pause, resume, takeover_now, restart };

using Command = std::variant<GazeCommand, Control>;

/// Parses one inbound client message. Throws Error with a human-readable
/// reason for anything malformed.
inline Command parse_command(const std::string & text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &) {
    throw Error("message is not a valid structured-text object");
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw Error("message needs a string 'type' field");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaze") {
    if (!j.contains("direction")) {
      throw Error("gaze message needs 'direction'");
    }
    const auto & d = j.at("direction");
    if (!d.is_array() || d.size() != 3 || !d[0].is_number() || !d[1].is_number() || !d[2].is_number()) {
      throw Error("gaze 'direction' must be a 3-vector");
    }
    const Vec3 v(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
    if (!v.allFinite() || !(v.norm() > 0.0)) {
      throw Error("gaze 'direction' must be finite and non-zero");
    }
    return GazeCommand{v};
  }
  if (type == "control") {
    const std::string action = j.value("action", "");
    if (action == "pause") {
      return Control::pause;
    }
    if (action == "resume") {
      return Control::resume;
    }
    if (action == "takeover-now") {
      return Control::takeover_now;
    }
    if (action == "restart") {
      return Control::restart;
    }
    throw Error("unknown control action '" + action + "'");
  }
  throw Error("unsupported message type '" + type + "'");
}

inline std::string error_message(const std::string & what)
{
  return nlohmann::json{{"type", "error"}, {"message", what}}.dump();
}

/// State message for one tick; everything in road coordinates plus raw vectors.
inline nlohmann::json state_json(const TickOutput & out, bool paused, bool finished)
{
  const TickRecord r = summarize(out, true);
  return {
    {"type", "state"},
    {"t", {{"tick", r.tick}, {"sim_time", r.sim_time}}},
    {"ego", r.frame.ego},
    {"automation", r.frame.automation},
    {"traffic", r.frame.traffic},
    {"believed", r.believed},
    {"relations", r.relations},
    {"gaps", r.gaps},
    {"fluents", r.fluents},
    {"events", r.events},
    {"possible_events", r.possible_events},
    {"divergences", r.divergences},
    {"latencies", *r.latencies},
    {"errors", r.errors},
    {"paused", paused},
    {"finished", finished},
  };
}

class Hub;

/// One websocket client. Lives on the single network thread.
class Client : public std::enable_shared_from_this<Client>
{
public:
  Client(tcp::socket && socket, Hub & hub) : ws_(std::move(socket)), hub_(hub) {}

  void start(http::request<http::string_body> req);
  void send(Message msg)
  {
    outbox_.push_back(std::move(msg));
    if (outbox_.size() == 1) {
      write_next();
    }
  }

private:
  void read_next();
  void write_next()
  {
    ws_.text(true);
    ws_.async_write(net::buffer(*outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) {
        self->write_next();
      }
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<Message> outbox_;
  Hub & hub_;
};

/// Network-side state: connected clients and the latest state message.
/// Touched only from the network thread.
class Hub
{
public:
  using Inbound = std::function<void(Command)>;

  explicit Hub(Inbound inbound) : inbound_(std::move(inbound)) {}

  void join(const std::shared_ptr<Client> & c)
  {
    clients_.push_back(c);
    if (latest_) {
      c->send(latest_snapshot_);
    }
  }

  void broadcast(Message state, Message snapshot)
  {
    latest_ = std::move(state);
    latest_snapshot_ = std::move(snapshot);
    std::vector<std::weak_ptr<Client>> alive;
    for (auto & w : clients_) {
      if (auto c = w.lock()) {
        c->send(latest_);
        alive.push_back(w);
      }
    }
    clients_ = std::move(alive);
  }

  void received(const std::shared_ptr<Client> & from, const std::string & text)
  {
    try {
      inbound_(parse_command(text));
    } catch (const Error & e) {
      from->send(std::make_shared<const std::string>(error_message(e.what())));
    }
  }

private:
  Inbound inbound_;
  std::vector<std::weak_ptr<Client>> clients_;
  Message latest_;
  Message latest_snapshot_;
};

inline void Client::start(http::request<http::string_body> req)
{
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) {
      return;
    }
    self->hub_.join(self);
    self->read_next();
  });
}

inline void Client::read_next()
{
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      return;
    }
    const std::string text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    self->hub_.received(self, text);
    self->read_next();
  });
}

inline std::string mime_type(const std::filesystem::path & p)
{
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

/// Plain HTTP connection: upgrades to a websocket or serves a static file.
class Connection : public std::enable_shared_from_this<Connection>
{
public:
  Connection(tcp::socket && socket, Hub & hub, const std::string & static_dir)
  : stream_(std::move(socket)), hub_(hub), static_dir_(static_dir)
  {
  }

  void start()
  {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) {
        self->dispatch();
      }
    });
  }

private:
  void dispatch()
  {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<Client>(stream_.release_socket(), hub_)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(respond());
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      self->stream_.socket().shutdown(tcp::socket::shutdown_send);
    });
  }

  http::response<http::string_body> respond() const
  {
    http::response<http::string_body> res{http::status::not_found, req_.version()};
    res.set(http::field::content_type, "text/plain");
    res.keep_alive(false);
    std::string target(req_.target());
    if (static_dir_.empty() || req_.method() != http::verb::get || target.find("..") != std::string::npos) {
      res.body() = "not found\n";
      res.prepare_payload();
      return res;
    }
    if (const auto q = target.find('?'); q != std::string::npos) {
      target.resize(q);
    }
    if (target.empty() || target.back() == '/') {
      target += "index.html";
    }
    const std::filesystem::path file = std::filesystem::path(static_dir_) / target.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      res.body() = "not found\n";
      res.prepare_payload();
      return res;
    }
    std::ostringstream os;
    os << in.rdbuf();
    res.result(http::status::ok);
    res.set(http::field::content_type, mime_type(file));
    res.body() = os.str();
    res.prepare_payload();
    return res;
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Hub & hub_;
  const std::string & static_dir_;
};

}  // namespace stream

/// Runs one session in real time and publishes it to websocket clients.
/// The tick loop thread owns the session; the network thread owns the
/// clients. They talk only through the command queue and posted messages.
class StreamServer
{
public:
  StreamServer(Scenario scenario, SessionConfig cfg, StreamOptions options)
  : options_(std::move(options)),
    session_(std::move(scenario), std::move(cfg)),
    hub_([this](stream::Command c) { enqueue(std::move(c)); }),
    acceptor_(ioc_)
  {
    if (!(options_.time_scale > 0.0)) {
      throw Error("time_scale must be positive");
    }
    namespace net = stream::net;
    try {
      const stream::tcp::endpoint endpoint(net::ip::make_address(options_.host), static_cast<unsigned short>(options_.port));
      acceptor_.open(endpoint.protocol());
      acceptor_.bind(endpoint);
      acceptor_.listen(net::socket_base::max_listen_connections);
    } catch (const boost::system::system_error & e) {
      throw Error("cannot listen on " + options_.host + ":" + std::to_string(options_.port) + ": " + e.what());
    }
  }

  StreamServer(const StreamServer &) = delete;
  StreamServer & operator=(const StreamServer &) = delete;

  ~StreamServer() { stop(); }

  int port() const { return acceptor_.local_endpoint().port(); }

  void start()
  {
    accept_next();
    network_ = std::thread([this] { ioc_.run(); });
    loop_ = std::thread([this] { run_loop(); });
  }

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait()
  {
    std::unique_lock lock(mutex_);
    wake_.wait(lock, [this] { return stopping_; });
  }

  void stop()
  {
    {
      std::lock_guard lock(mutex_);
      if (stopped_) {
        return;
      }
      stopping_ = true;
      stopped_ = true;
    }
    wake_.notify_all();
    if (loop_.joinable()) {
      loop_.join();
    }
    ioc_.stop();
    if (network_.joinable()) {
      network_.join();
    }
  }

private:
  void enqueue(stream::Command c)
  {
    {
      std::lock_guard lock(mutex_);
      inbox_.push_back(std::move(c));
    }
    wake_.notify_all();
  }

  void accept_next()
  {
    acceptor_.async_accept(stream::net::make_strand(ioc_), [this](boost::beast::error_code ec, stream::tcp::socket s) {
      if (!ec) {
        std::make_shared<stream::Connection>(std::move(s), hub_, options_.static_dir)->start();
      }
      if (acceptor_.is_open()) {
        accept_next();
      }
    });
  }

  /// Applies queued commands at a tick boundary. Returns false on shutdown.
  bool drain(bool & paused)
  {
    std::deque<stream::Command> batch;
    {
      std::lock_guard lock(mutex_);
      if (stopping_) {
        return false;
      }
      batch.swap(inbox_);
    }
    for (auto & c : batch) {
      if (const auto * g = std::get_if<stream::GazeCommand>(&c)) {
        live_gaze_ = g->direction;
        continue;
      }
      switch (std::get<stream::Control>(c)) {
        case stream::Control::pause: paused = true; break;
        case stream::Control::resume: paused = false; break;
        case stream::Control::takeover_now: session_.request_takeover(); break;
        case stream::Control::restart:
          session_.restart();
          live_gaze_.reset();
          break;
      }
    }
    return true;
  }

  void publish(const TickOutput & out, bool paused)
  {
    auto j = stream::state_json(out, paused, session_.finished());
    auto state = std::make_shared<const std::string>(j.dump());
    j["type"] = "snapshot";
    auto snapshot = std::make_shared<const std::string>(j.dump());
    stream::net::post(ioc_, [this, state, snapshot]() mutable { hub_.broadcast(std::move(state), std::move(snapshot)); });
  }

  void run_loop()
  {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(session_.scenario().dt() / options_.time_scale));
    bool paused = false;
    auto deadline = clock::now();
    while (drain(paused)) {
      if (paused || session_.finished()) {
        std::unique_lock lock(mutex_);
        wake_.wait_for(lock, std::chrono::milliseconds(50), [this] { return stopping_ || !inbox_.empty(); });
        deadline = clock::now();
        continue;
      }
      const auto out = session_.step(live_gaze_);
      publish(out, paused);
      // No tick is skipped when late; pacing just resumes from now.
      deadline = std::max(deadline + period, clock::now() - period);
      std::unique_lock lock(mutex_);
      wake_.wait_until(lock, deadline, [this] { return stopping_; });
    }
  }

  StreamOptions options_;
  Session session_;
  std::optional<Vec3> live_gaze_;

  stream::net::io_context ioc_;
  stream::Hub hub_;
  stream::tcp::acceptor acceptor_;
  std::thread network_;
  std::thread loop_;

  std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<stream::Command> inbox_;
  bool stopping_{false};
  bool stopped_{false};
};

}  // namespace situ

#endif  // SITU__STREAM_SERVER_HPP_
