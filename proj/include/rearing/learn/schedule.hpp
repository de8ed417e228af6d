#pragma once

namespace rearing::learn {

/// Linear warmup to base_lr over the first warmup_steps, then cosine decay to
/// zero over the remainder, no restarts.
struct LrSchedule {
    double base_lr = 0.1;
    int warmup_steps = 0;
    int total_steps = 1;

    void validate() const;
    /// Learning rate at a zero-based step in [0, total_steps).
    double at(int step) const;
};

/// The batch-scaled default: 0.5 * batch_size / 256.
double auto_base_lr(int batch_size);

}  // namespace rearing::learn
