#pragma once

#include <string>

#include "jointex/config.hpp"

namespace jointex {

// Exit codes: 0 success, 2 configuration error, 3 data/integrity error,
// 4 numeric divergence, 1 anything else.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

int cmd_train(const std::string& config_path, const TrainOverrides& overrides);

int cmd_eval(const std::string& config_path, const std::string& checkpoint,
             const std::string& corpus, const std::string& mode);

int cmd_predict(const std::string& checkpoint, const std::string& input_path,
                const std::string& output_path);

}  // namespace jointex
