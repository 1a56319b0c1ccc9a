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

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "propaganda/error.h"

namespace propaganda {

// Raised when an objective produces NaN/Inf that backtracking cannot escape.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

struct DescentConfig {
  double initial_step = 1e-5;
  std::size_t max_iters = 500;
  double tolerance = 1e-6;     // stop once ||grad|| <= tolerance
  double armijo = 1e-4;        // sufficient-decrease constant
  double shrink = 0.5;
  double grow = 2.0;           // step growth after an accepted step
  std::size_t max_backtracks = 60;
};

struct DescentTrace {
  std::vector<double> loss;       // loss[0] is the initial value
  std::vector<double> grad_norm;
  bool converged = false;         // gradient norm reached tolerance

  std::size_t iterations() const { return loss.empty() ? 0 : loss.size() - 1; }
  void write_csv(std::ostream& out) const;
};

// Writes the gradient into `grad` (same size as params) and returns the loss.
using Objective = std::function<double(std::span<const double> params, std::span<double> grad)>;

// Full-batch gradient descent with Armijo backtracking. Accepted steps never
// increase the loss.
DescentTrace minimize(const Objective& objective, std::vector<double>& params,
                      const DescentConfig& config);

double l2_norm(std::span<const double> v);

}  // namespace propaganda
