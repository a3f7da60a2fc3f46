#include "retrace/server.hpp"

#include <sys/socket.h>

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

namespace retrace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using json = nlohmann::ordered_json;

namespace {

// Environment port backed by a WebSocket client. Reads are synchronous: the
// executor blocks on the next answer.
class SocketEnvironment : public Environment {
 public:
  explicit SocketEnvironment(websocket::stream<tcp::socket>& ws) : ws_(ws) {}

  void send(const json& message) {
    if (closed_) return;
    try {
      ws_.text(true);
      ws_.write(asio::buffer(message.dump() + "\n"));
    } catch (const std::exception&) {
      closed_ = true;
    }
  }

  ActionOutcome perform(const GroundAction& action, int) override {
    PromptRequest p = action_prompt(action);
    return parse_action_answer(ask("action", p.text, p.buttons));
  }

  std::string answer_prompt(int, const PromptRequest& prompt) override {
    return ask("question", prompt.text, prompt.buttons);
  }

 private:
  std::string ask(const std::string& kind, const std::string& text, const std::vector<std::string>& buttons) {
    while (paused_) handle(next_message(), nullptr, {});
    const int id = ++next_id_;
    send({{"type", "prompt"}, {"id", id}, {"kind", kind}, {"text", text}, {"buttons", buttons}});
    std::optional<std::string> answer;
    while (!answer) handle(next_message(), &answer, buttons, id);
    return *answer;
  }

  void error(const std::string& message) { send({{"type", "error"}, {"message", message}}); }

  void handle(const std::string& line, std::optional<std::string>* answer,
              const std::vector<std::string>& buttons, int id = 0) {
    json m;
    try {
      m = json::parse(line);
    } catch (const json::parse_error&) {
      return error("malformed JSON");
    }
    std::string type = m.is_object() && m.contains("type") && m["type"].is_string() ? m["type"].get<std::string>() : "";
    if (type == "pause") {
      paused_ = true;
    } else if (type == "resume") {
      paused_ = false;
    } else if (type == "answer") {
      if (!answer) return error("no prompt is pending");
      if (!m.contains("id") || !m["id"].is_number_integer() || m["id"].get<int>() != id)
        return error("answer for an unknown prompt id");
      if (!m.contains("button") || !m["button"].is_string()) return error("answer without a button");
      std::string button = m["button"].get<std::string>();
      if (std::find(buttons.begin(), buttons.end(), button) == buttons.end())
        return error("'" + button + "' is not one of the prompt's buttons");
      *answer = button;
    } else {
      error("unknown message type '" + type + "'");
    }
  }

  std::string next_message() {
    while (pending_.empty()) {
      if (closed_) throw EnvironmentClosed("console disconnected");
      beast::flat_buffer buf;
      try {
        ws_.read(buf);
      } catch (const std::exception&) {
        closed_ = true;
        throw EnvironmentClosed("console disconnected");
      }
      std::istringstream in(beast::buffers_to_string(buf.data()));
      std::string line;
      while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) pending_.push_back(line);
    }
    std::string line = pending_.front();
    pending_.erase(pending_.begin());
    return line;
  }

  websocket::stream<tcp::socket>& ws_;
  std::vector<std::string> pending_;
  int next_id_ = 0;
  bool paused_ = false;
  bool closed_ = false;
};

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

struct Server::Impl {
  RobotModel model;
  TaskProgram program;
  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::atomic<bool> busy{false};
  std::atomic<int> result{0};
  std::mutex threads_mutex;
  std::vector<std::thread> threads;

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      beast::error_code ignored;
      socket.set_option(tcp::no_delay(true), ignored);
      std::lock_guard<std::mutex> lock(threads_mutex);
      threads.emplace_back([this, s = std::move(socket)]() mutable { handle(std::move(s)); });
      accept();
    });
  }

  void handle(tcp::socket socket) {
    try {
      beast::flat_buffer buf;
      http::request<http::string_body> req;
      http::read(socket, buf, req);
      if (websocket::is_upgrade(req)) {
        websocket::stream<tcp::socket> ws(std::move(socket));
        ws.accept(req);
        if (busy.exchange(true)) {
          ws.text(true);
          ws.write(asio::buffer(json{{"type", "error"}, {"message", "busy: a session is already active"}}.dump() + "\n"));
          ws.close(websocket::close_code::try_again_later);
          return;
        }
        int code = session(ws);
        busy = false;
        if (options.once) {
          result = code;
          asio::post(ioc, [this] { stop_accepting(); });
        }
        return;
      }
      serve_file(socket, req);
    } catch (const std::exception&) {
      // A client that goes away mid-handshake is not our concern.
    }
  }

  int session(websocket::stream<tcp::socket>& ws) {
    SocketEnvironment env(ws);
    Session s(model, program, env, options.executor);
    s.on_event = [&](const TraceEvent& e) { env.send({{"type", "event"}, {"event", e.to_json()}}); };
    s.on_belief = [&](int t, const BeliefState& b) {
      json lits = json::array();
      for (const auto& [lit, p] : b.entries()) lits.push_back({{"name", to_string(lit)}, {"p", p}});
      env.send({{"type", "belief"}, {"timestep", t}, {"literals", lits}});
    };
    RunStatus status = s.run();
    json end{{"type", status == RunStatus::kDone ? "done" : "abort"}, {"status", to_string(status)},
             {"exit_code", exit_code(status)}};
    const auto& events = s.log().events();
    if (!events.empty() && events.back().kind == EventKind::kAbort) {
      end["reason"] = events.back().payload.at("reason");
      if (events.back().payload.contains("detail")) end["detail"] = events.back().payload.at("detail");
    }
    env.send(end);
    close_politely(ws);
    return exit_code(status);
  }

  // Close handshake, giving up on clients that never answer it.
  static void close_politely(websocket::stream<tcp::socket>& ws) {
    std::mutex m;
    std::condition_variable cv;
    bool closed = false;
    const int fd = ws.next_layer().native_handle();
    std::thread watchdog([&] {
      std::unique_lock<std::mutex> lock(m);
      if (!cv.wait_for(lock, std::chrono::seconds(2), [&] { return closed; })) ::shutdown(fd, SHUT_RDWR);
    });
    beast::error_code ec;
    ws.close(websocket::close_code::normal, ec);
    {
      std::lock_guard<std::mutex> lock(m);
      closed = true;
    }
    cv.notify_one();
    watchdog.join();
  }

  void serve_file(tcp::socket& socket, const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    namespace fs = std::filesystem;
    std::string target(req.target());
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target.back() == '/') target += "index.html";
    fs::path path;
    bool ok = !options.static_dir.empty() && req.method() == http::verb::get &&
              target.find("..") == std::string::npos;
    if (ok) {
      path = fs::path(options.static_dir) / target.substr(1);
      ok = fs::is_regular_file(path);
    }
    if (ok) {
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      res.result(http::status::ok);
      res.set(http::field::content_type, mime_type(path));
      res.body() = ss.str();
    } else {
      res.result(http::status::not_found);
      res.set(http::field::content_type, "text/plain");
      res.body() = "not found\n";
    }
    res.prepare_payload();
    http::write(socket, res);
    beast::error_code ec;
    socket.shutdown(tcp::socket::shutdown_both, ec);
  }

  void stop_accepting() {
    beast::error_code ec;
    acceptor.close(ec);
  }
};

Server::Server(RobotModel model, TaskProgram program, ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->model = std::move(model);
  impl_->program = std::move(program);
  impl_->options = std::move(options);
  check_task(impl_->program, impl_->model);
  tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
}

Server::~Server() {
  stop();
  std::lock_guard<std::mutex> lock(impl_->threads_mutex);
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

int Server::run() {
  impl_->accept();
  impl_->ioc.run();
  std::vector<std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(impl_->threads_mutex);
    threads.swap(impl_->threads);
  }
  for (auto& t : threads) t.join();
  return impl_->result;
}

void Server::stop() {
  asio::post(impl_->ioc, [this] { impl_->stop_accepting(); });
}

}  // namespace retrace
