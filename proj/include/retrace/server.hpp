#pragma once

#include <memory>
#include <string>

#include "retrace/executor.hpp"

namespace retrace {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::string static_dir;      // served over plain HTTP when set
  bool once = false;           // stop after the first session ends
  ExecutorConfig executor;
};

// Serves one interactive session at a time over WebSocket. Each text frame
// carries newline-delimited JSON messages.
//
//   server -> client  {"type":"prompt","id","kind","text","buttons"}
//                     {"type":"event","event":{...}}
//                     {"type":"belief","timestep","literals":[{"name","p"}]}
//                     {"type":"done"|"abort","status","exit_code",...}
//                     {"type":"error","message"}
//   client -> server  {"type":"answer","id","button"}
//                     {"type":"pause"} {"type":"resume"}
class Server {
 public:
  Server(RobotModel model, TaskProgram program, ServerOptions options);
  ~Server();

  // Bound port, valid after construction.
  unsigned short port() const;
  // Serves until stop() or, with `once`, until the first session ends.
  // Returns that session's exit code (0 when stopped without one).
  int run();
  // Safe to call from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace retrace
