#include "retrace/sweep.hpp"

#include <cstdio>

namespace retrace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("grid needs at least one point", {});
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &tail) != 3)
    throw ValidationError("grid must be lo:hi:n, got '" + text + "'", {});
  return linspace(lo, hi, n);
}

std::string classify_run(const RunResult& r, const std::string& recovered_label) {
  const auto& events = r.log.events();
  size_t first = events.size();
  for (size_t i = 0; i < events.size() && first == events.size(); ++i)
    if (events[i].kind == EventKind::kPrecondFail || events[i].kind == EventKind::kActionCannot) first = i;
  if (first == events.size()) return r.status == RunStatus::kDone ? "no-failure" : "RF";
  if (events[first].kind == EventKind::kPrecondFail) return "PF";
  for (size_t i = first + 1; i < events.size(); ++i) {
    if (events[i].kind == EventKind::kDiagnosis) {
      if (r.diagnoses.front().failure_class == FailureClass::kUnintendedEffect) return "IF";
      for (size_t j = i + 1; j < events.size(); ++j) {
        if (events[j].kind == EventKind::kResume) return recovered_label;
        if (events[j].kind == EventKind::kAbort) return "RF";
      }
      return "RF";
    }
    if (events[i].kind == EventKind::kAbort) return "RF";
  }
  return "RF";
}

std::vector<SweepPoint> sweep(const RunInputs& base, const SweepSpec& spec, const ExecutorConfig& config) {
  for (const auto* name : {&spec.param_a, &spec.param_b})
    if (!base.model.params.count(*name)) throw ValidationError("unknown parameter '" + *name + "'", {});
  for (const auto* grid : {&spec.grid_a, &spec.grid_b})
    for (double v : *grid)
      if (!(v > 0.0 && v < 0.5)) throw ValidationError("sweep values must lie in (0, 0.5)", {});
  std::vector<SweepPoint> out;
  for (double a : spec.grid_a) {
    for (double b : spec.grid_b) {
      RunInputs in = base;
      set_params(in.model, {{spec.param_a, a}, {spec.param_b, b}});
      RunResult r = run_scripted(in, config);
      SweepPoint p{a, b, classify_run(r, spec.recovered_label), 0, {}};
      if (!r.diagnoses.empty()) {
        p.t_f = r.diagnoses.front().t_f;
        p.culprit = r.diagnoses.front().culprit;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "alpha_a,alpha_b,class,t_f,culprit\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,", p.a, p.b);
    std::string culprit = p.culprit.empty() ? "-" : p.culprit;
    if (culprit.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : culprit) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      culprit = q + "\"";
    }
    out += buf + p.cls + "," + (p.t_f ? std::to_string(p.t_f) : "-") + "," + culprit + "\n";
  }
  return out;
}

}  // namespace retrace
