#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "retrace/error.hpp"
#include "retrace/model.hpp"

// The non-expert tier: a straight-line language in the style of the Python
// listings people already write for robots.
//
//   robot.goto("mail room")
//   for num in range(n):
//     robot.pickup(f"package {num}")
//   room = robot.prompt("Which room?", buttons=["A323", "A325"])
//   robot.escortTo(room)
//
// Statements: robot.<action>(args), name = expr, robot.prompt(...),
// for v in range(N): with N a literal or a top-level integer constant, and
// def f(params): helpers without recursion. Expressions: "strings", integers,
// f"interpolated {v}" strings, names, [lists] and list[index].
namespace retrace {

struct TaskExpr {
  enum class Kind { kString, kInt, kFString, kName, kList, kIndex, kPrompt };

  Kind kind = Kind::kString;
  std::string text;  // kString, kName
  long value = 0;    // kInt
  // kFString: literal pieces around the embedded expressions in `items`,
  // parts.size() == items.size() + 1
  std::vector<std::string> parts;
  // kList elements; kIndex {base, index}; kPrompt {text, buttons list}
  std::vector<TaskExpr> items;
  SourceLoc loc;
};

struct TaskArg {
  std::string keyword;  // empty for positional
  TaskExpr value;
};

struct TaskStmt {
  enum class Kind { kAction, kAssign, kPrompt, kFor, kDef, kCall };

  Kind kind = Kind::kAction;
  std::string name;  // action, assigned variable, loop variable, function
  std::vector<TaskArg> args;       // kAction, kCall
  TaskExpr value;                  // kAssign, kPrompt, kFor (loop bound)
  std::vector<std::string> params; // kDef
  std::vector<TaskStmt> body;      // kFor, kDef
  SourceLoc loc;
};

struct TaskProgram {
  std::vector<TaskStmt> statements;
};

// `overrides` replaces the value of top-level integer constants, e.g. n=3.
TaskProgram parse_task(std::string_view text,
                       const std::map<std::string, long>& overrides = {});
TaskProgram load_task(const std::string& path,
                      const std::map<std::string, long>& overrides = {});

// Checks that every robot.<action> names a model action and that positional
// and keyword arguments fit its parameters.
void check_task(const TaskProgram& program, const RobotModel& model);

struct ActionRequest {
  std::string name;
  std::vector<std::string> positional;
  ArgMap named;
  SourceLoc loc;

  // pickup("Package A")
  std::string text() const;
};

struct PromptRequest {
  std::string text;
  std::vector<std::string> buttons;
  SourceLoc loc;
};

struct EndOfProgram {};

using TaskStep = std::variant<ActionRequest, PromptRequest, EndOfProgram>;

struct TaskValue {
  enum class Kind { kString, kInt, kList };

  Kind kind = Kind::kString;
  std::string text;
  long value = 0;
  std::vector<TaskValue> items;
};

// Interpreter position: a frame stack plus variable bindings. Advancing is
// deterministic given the answers fed back to prompts.
class TaskCursor {
 public:
  explicit TaskCursor(const TaskProgram& program);

  // Produces the next action or prompt. After a prompt, answer() must be
  // called before the next call to next().
  TaskStep next();
  void answer(const std::string& button);
  bool awaiting_answer() const { return awaiting_; }
  bool done() const;

  // Materialized ground-action requests so far.
  int actions_emitted() const { return actions_; }

 private:
  struct Frame {
    const std::vector<TaskStmt>* body = nullptr;
    size_t pc = 0;
    bool loop = false;
    bool call = false;
    std::string loop_var;
    long next = 0;
    long end = 0;
  };

  TaskValue eval(const TaskExpr& e) const;
  std::string eval_string(const TaskExpr& e) const;
  void bind(const std::string& name, TaskValue v);

  std::map<std::string, const TaskStmt*> functions_;
  std::vector<Frame> frames_;
  std::vector<std::map<std::string, TaskValue>> scopes_;
  bool awaiting_ = false;
  std::string pending_target_;
  int actions_ = 0;
};

}  // namespace retrace
