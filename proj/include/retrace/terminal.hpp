#pragma once

#include <istream>
#include <ostream>

#include "retrace/executor.hpp"

namespace retrace {

// A person at a terminal answers every action and prompt by number.
class TerminalEnvironment : public Environment {
 public:
  TerminalEnvironment(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  ActionOutcome perform(const GroundAction& action, int occurrence) override;
  std::string answer_prompt(int id, const PromptRequest& prompt) override;

 private:
  std::string choose(const PromptRequest& prompt);

  std::istream& in_;
  std::ostream& out_;
};

}  // namespace retrace
