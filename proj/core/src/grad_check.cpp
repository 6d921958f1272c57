#include "rewsac/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rewsac::nn {

GradCheckReport finite_diff_check(
    const std::function<double(const ParamVector&)>& f, const ParamVector& at,
    const ParamVector& analytic, double fd_step, double tolerance) {
  if (analytic.size() != at.size()) {
    throw std::invalid_argument("finite_diff_check: gradient size mismatch");
  }
  if (!(fd_step > 0.0) || !(tolerance > 0.0)) {
    throw std::invalid_argument("finite_diff_check: step/tolerance positive");
  }

  std::vector<double> fd(at.size());
  ParamVector probe = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    double orig = probe.values()[i];
    probe.values()[i] = orig + fd_step;
    double fp = f(probe);
    probe.values()[i] = orig - fd_step;
    double fm = f(probe);
    probe.values()[i] = orig;
    fd[i] = (fp - fm) / (2.0 * fd_step);
  }

  double scale = 1e-12;
  for (std::size_t i = 0; i < at.size(); ++i) {
    scale = std::max(scale, std::abs(analytic.values()[i]));
    scale = std::max(scale, std::abs(fd[i]));
  }

  GradCheckReport rep;
  for (std::size_t i = 0; i < at.size(); ++i) {
    double err = std::abs(analytic.values()[i] - fd[i]) / scale;
    if (err >= rep.max_rel_err) {
      rep.max_rel_err = err;
      rep.worst_index = i;
      rep.analytic_at_worst = analytic.values()[i];
      rep.numeric_at_worst = fd[i];
    }
  }
  rep.pass = rep.max_rel_err <= tolerance;
  return rep;
}

}  // namespace rewsac::nn
