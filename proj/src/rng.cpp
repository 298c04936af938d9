#include "lexdiv/rng.hpp"

#include <algorithm>

namespace lexdiv {

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
    std::vector<size_t> idx = permutation(n);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace lexdiv
