#include "retrace/terminal.hpp"

#include <string>

namespace retrace {

std::string TerminalEnvironment::choose(const PromptRequest& prompt) {
  while (true) {
    out_ << prompt.text << "\n";
    for (size_t i = 0; i < prompt.buttons.size(); ++i) out_ << "  [" << i + 1 << "] " << prompt.buttons[i] << "\n";
    out_ << "> " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw EnvironmentClosed("end of input");
    try {
      size_t pos = 0;
      int choice = std::stoi(line, &pos);
      if (pos == line.size() && choice >= 1 && choice <= static_cast<int>(prompt.buttons.size()))
        return prompt.buttons[choice - 1];
    } catch (const std::exception&) {
    }
    for (const auto& b : prompt.buttons)
      if (b == line) return b;
    out_ << "please answer with a number from 1 to " << prompt.buttons.size() << "\n";
  }
}

ActionOutcome TerminalEnvironment::perform(const GroundAction& action, int) {
  return parse_action_answer(choose(action_prompt(action)));
}

std::string TerminalEnvironment::answer_prompt(int, const PromptRequest& prompt) { return choose(prompt); }

}  // namespace retrace
