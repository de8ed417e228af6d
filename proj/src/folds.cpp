#include "rearing/probe/folds.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "rearing/core/rng.hpp"

namespace rearing::probe {

FoldScheme scheme_from_string(const std::string& s) {
    if (s == "train10_test2") return FoldScheme::Train10Test2;
    if (s == "train2_test10") return FoldScheme::Train2Test10;
    if (s == "train1_test11") return FoldScheme::Train1Test11;
    throw std::invalid_argument("unknown fold scheme '" + s +
                                "' (expected train10_test2, train2_test10, train1_test11)");
}

const char* to_string(FoldScheme s) {
    switch (s) {
        case FoldScheme::Train10Test2: return "train10_test2";
        case FoldScheme::Train2Test10: return "train2_test10";
        case FoldScheme::Train1Test11: return "train1_test11";
    }
    return "?";
}

const std::vector<FoldScheme>& all_schemes() {
    static const std::vector<FoldScheme> ss{FoldScheme::Train10Test2, FoldScheme::Train2Test10,
                                            FoldScheme::Train1Test11};
    return ss;
}

int n_train_ranges(FoldScheme s) {
    switch (s) {
        case FoldScheme::Train10Test2: return 10;
        case FoldScheme::Train2Test10: return 2;
        case FoldScheme::Train1Test11: return 1;
    }
    return 0;
}

int n_folds(FoldScheme s) { return s == FoldScheme::Train1Test11 ? 12 : 6; }

void FoldSplit::validate() const {
    std::set<int> seen;
    for (int r : train_ranges) {
        if (r < 1 || r > 12) throw std::invalid_argument("FoldSplit: range out of 1..12");
        if (!seen.insert(r).second) throw std::invalid_argument("FoldSplit: duplicate range");
    }
    for (int r : test_ranges) {
        if (r < 1 || r > 12) throw std::invalid_argument("FoldSplit: range out of 1..12");
        if (!seen.insert(r).second) {
            throw std::invalid_argument("FoldSplit: train and test overlap");
        }
    }
    if (seen.size() != 12) throw std::invalid_argument("FoldSplit: train+test must cover 1..12");
}

std::vector<FoldSplit> make_folds(FoldScheme scheme, std::uint64_t seed) {
    std::vector<int> ranges{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    Pcg32 rng(seed, derive_stream(seed, {0x666f6c64}));
    for (int i = 11; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(i + 1)));
        std::swap(ranges[static_cast<std::size_t>(i)], ranges[static_cast<std::size_t>(j)]);
    }

    std::vector<FoldSplit> folds;
    if (scheme == FoldScheme::Train1Test11) {
        for (int f = 0; f < 12; ++f) {
            FoldSplit split;
            split.fold_id = f;
            split.train_ranges = {ranges[static_cast<std::size_t>(f)]};
            for (int i = 0; i < 12; ++i) {
                if (i != f) split.test_ranges.push_back(ranges[static_cast<std::size_t>(i)]);
            }
            std::sort(split.test_ranges.begin(), split.test_ranges.end());
            split.validate();
            folds.push_back(std::move(split));
        }
        return folds;
    }

    for (int f = 0; f < 6; ++f) {
        std::vector<int> pair{ranges[static_cast<std::size_t>(2 * f)],
                              ranges[static_cast<std::size_t>(2 * f + 1)]};
        std::vector<int> rest;
        for (int i = 0; i < 12; ++i) {
            if (i != 2 * f && i != 2 * f + 1) rest.push_back(ranges[static_cast<std::size_t>(i)]);
        }
        std::sort(pair.begin(), pair.end());
        std::sort(rest.begin(), rest.end());
        FoldSplit split;
        split.fold_id = f;
        if (scheme == FoldScheme::Train10Test2) {
            split.train_ranges = rest;
            split.test_ranges = pair;
        } else {
            split.train_ranges = pair;
            split.test_ranges = rest;
        }
        split.validate();
        folds.push_back(std::move(split));
    }
    return folds;
}

}  // namespace rearing::probe
