#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rearing::probe {

enum class FoldScheme { Train10Test2, Train2Test10, Train1Test11 };

FoldScheme scheme_from_string(const std::string& s);
const char* to_string(FoldScheme s);
const std::vector<FoldScheme>& all_schemes();

int n_train_ranges(FoldScheme s);  // 10, 2, 1
int n_folds(FoldScheme s);         // 6, 6, 12

struct FoldSplit {
    int fold_id = 0;
    std::vector<int> train_ranges;  // viewpoint indices, ascending
    std::vector<int> test_ranges;

    void validate() const;
};

/// Folds for a scheme. The paired schemes share one seeded partition of the 12
/// viewpoint ranges into 6 pairs; the two-range side is the test set in
/// Train10Test2 and the train set in Train2Test10. Train1Test11 holds one
/// range out per fold as the training set.
std::vector<FoldSplit> make_folds(FoldScheme scheme, std::uint64_t seed);

}  // namespace rearing::probe
