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

#include "propaganda/optimizer.h"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace propaganda {
namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void DescentTrace::write_csv(std::ostream& out) const {
  out << "iter,loss,grad_norm\n";
  char buf[96];
  for (std::size_t i = 0; i < loss.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, loss[i], grad_norm[i]);
    out << buf;
  }
}

DescentTrace minimize(const Objective& objective, std::vector<double>& params,
                      const DescentConfig& config) {
  if (!(config.initial_step > 0.0)) throw Error("learning rate must be positive");
  if (!(config.tolerance > 0.0)) throw Error("tolerance must be positive");

  std::vector<double> grad(params.size());
  double loss = objective(params, grad);
  if (!std::isfinite(loss) || !all_finite(grad)) {
    throw TrainingError("non-finite loss or gradient at the initial point", 0);
  }
  DescentTrace trace;
  double gnorm = l2_norm(grad);
  trace.loss.push_back(loss);
  trace.grad_norm.push_back(gnorm);

  std::vector<double> trial(params.size());
  std::vector<double> trial_grad(params.size());
  double step = config.initial_step;
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    if (gnorm <= config.tolerance) {
      trace.converged = true;
      break;
    }
    bool accepted = false;
    bool saw_finite = false;
    for (std::size_t k = 0; k < config.max_backtracks; ++k) {
      for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] - step * grad[i];
      const double trial_loss = objective(trial, trial_grad);
      if (std::isfinite(trial_loss) && all_finite(trial_grad)) {
        saw_finite = true;
        if (trial_loss <= loss - config.armijo * step * gnorm * gnorm) {
          params.swap(trial);
          grad.swap(trial_grad);
          loss = trial_loss;
          accepted = true;
          break;
        }
      }
      step *= config.shrink;
    }
    if (!accepted) {
      if (!saw_finite) throw TrainingError("loss diverged to NaN/Inf", it);
      // No representable decrease left along the gradient.
      break;
    }
    gnorm = l2_norm(grad);
    trace.loss.push_back(loss);
    trace.grad_norm.push_back(gnorm);
    step *= config.grow;
  }
  if (gnorm <= config.tolerance) trace.converged = true;
  return trace;
}

}  // namespace propaganda
