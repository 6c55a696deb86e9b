#pragma once

#include <cstddef>
#include <optional>

namespace tsks {

/// One environment step as seen by the harness. `oracle_mean` and
/// `chosen_mean` are expected rewards under the hidden state, so regret
/// accounting is deterministic given the arm-choice sequence.
struct StepOutcome {
    double raw_reward = 0.0;
    std::optional<double> binary_reward;  // set by environments with a natural 0/1 reward
    std::size_t oracle_arm = 0;
    double oracle_mean = 0.0;
    double chosen_mean = 0.0;
    bool change_occurred = false;
};

} // namespace tsks
