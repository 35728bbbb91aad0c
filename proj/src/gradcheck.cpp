#include "jointex/gradcheck.hpp"

#include <cmath>

namespace jointex {

GradCheckReport check_gradients(
    const std::function<Tensor(Tape&)>& build_loss,
    const std::vector<std::pair<std::string, Tensor>>& params, double step) {
  // Analytic pass.
  for (const auto& [name, p] : params) {
    Tensor t = p;
    t.ensure_grad();
    t.zero_grad();
  }
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = build_loss(tape);
    tape.backward(loss);
    for (const auto& [name, p] : params) analytic.push_back(p.grad());
  }

  auto eval = [&build_loss]() {
    Tape tape(/*recording=*/false);
    return build_loss(tape).item();
  };

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor p = params[pi].second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + step;
      const double up = eval();
      p[i] = saved - step;
      const double down = eval();
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[pi][i];
      const double denom = std::max({1.0, std::fabs(a), std::fabs(numeric)});
      const double err = std::fabs(a - numeric) / denom;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_parameter = params[pi].first;
        report.worst_coordinate = i;
      }
    }
  }
  return report;
}

}  // namespace jointex
