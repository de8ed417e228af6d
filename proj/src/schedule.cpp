#include "rearing/learn/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rearing::learn {

void LrSchedule::validate() const {
    if (!(base_lr > 0.0)) throw std::invalid_argument("LrSchedule: base_lr must be positive");
    if (warmup_steps < 0 || total_steps < 1 || warmup_steps >= total_steps) {
        throw std::invalid_argument("LrSchedule: need 0 <= warmup_steps < total_steps");
    }
}

double LrSchedule::at(int step) const {
    validate();
    if (step < 0 || step >= total_steps) {
        throw std::invalid_argument("LrSchedule: step " + std::to_string(step) + " outside [0, " +
                                    std::to_string(total_steps) + ")");
    }
    if (step < warmup_steps) {
        // Ramp from 0 so that lr hits base_lr exactly where the cosine phase begins.
        return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
    }
    const double progress =
        static_cast<double>(step - warmup_steps) / static_cast<double>(total_steps - warmup_steps);
    return base_lr * 0.5 * (1.0 + std::cos(3.14159265358979323846 * progress));
}

double auto_base_lr(int batch_size) {
    if (batch_size < 1) throw std::invalid_argument("auto_base_lr: batch_size must be >= 1");
    return 0.5 * static_cast<double>(batch_size) / 256.0;
}

}  // namespace rearing::learn
