#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "jointex/tape.hpp"
#include "jointex/tensor.hpp"

namespace jointex {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_coordinate = 0;
};

// Compares the tape gradient of a scalar loss against central finite
// differences, coordinate by coordinate. build_loss must be deterministic
// (disable dropout) and rebuild the loss from the current parameter values
// on the tape it is given. Errors are normalized by max(1, |a|, |n|).
GradCheckReport check_gradients(
    const std::function<Tensor(Tape&)>& build_loss,
    const std::vector<std::pair<std::string, Tensor>>& params,
    double step = 1e-5);

}  // namespace jointex
