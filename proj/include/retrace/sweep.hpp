#pragma once

#include <string>
#include <vector>

#include "retrace/runner.hpp"

namespace retrace {

struct SweepSpec {
  std::string param_a;
  std::string param_b;
  std::vector<double> grid_a;
  std::vector<double> grid_b;
  // Class name for a postcondition failure that was recovered (RV or RP).
  std::string recovered_label = "RV";
};

// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);
// "lo:hi:n" as accepted on the command line.
std::vector<double> parse_grid(const std::string& text);

struct SweepPoint {
  double a = 0.0;
  double b = 0.0;
  std::string cls;
  int t_f = 0;  // 0 when there was no diagnosis
  std::string culprit;
};

// Outcome class of a finished run, decided by the first failure:
//   no-failure  the program ran without a failed action
//   PF          a precondition was ML-false before dispatch
//   IF          the diagnosis was an unintended effect
//   <recovered> a postcondition failure whose recovery resumed the program
//   RF          any other unsuccessful outcome
std::string classify_run(const RunResult& r, const std::string& recovered_label);

// Runs the scenario once per grid point, a-major. Grid values must lie in
// (0, 0.5).
std::vector<SweepPoint> sweep(const RunInputs& base, const SweepSpec& spec,
                              const ExecutorConfig& config = {});

// alpha_a,alpha_b,class,t_f,culprit with "-" where not applicable.
std::string to_csv(const std::vector<SweepPoint>& points);

}  // namespace retrace
