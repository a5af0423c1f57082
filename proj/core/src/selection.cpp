// SPDX-License-Identifier: Apache-2.0
#include "plm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plm/errors.hpp"

namespace plm {

ResidualOrder interpret(const TwoLayerNet& net, const Batch& all, double epsilon,
                        OrderMode mode) {
    if (all.empty()) throw InvalidInputError("interpret over an empty dataset");

    const std::size_t n = all.size();
    std::vector<double> sq(n);
    // Acceptability is decided on |e| <= epsilon, the same test acceptable()
    // uses, so boundary instances cannot be classified differently here.
    std::vector<char> ok(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double e = net.residual(all.instances[c]);
        sq[c] = e * e;
        ok[c] = std::abs(e) <= epsilon;
    }

    ResidualOrder order;
    order.perm.resize(n);
    std::iota(order.perm.begin(), order.perm.end(), std::size_t{0});
    if (mode == OrderMode::lts) {
        std::stable_sort(order.perm.begin(), order.perm.end(),
                         [&sq](std::size_t a, std::size_t b) { return sq[a] < sq[b]; });
    }

    order.sq_residuals.resize(n);
    for (std::size_t c = 0; c < n; ++c) order.sq_residuals[c] = sq[order.perm[c]];

    std::size_t prefix = 0;
    while (prefix < n && ok[order.perm[prefix]]) ++prefix;
    order.n_acceptable = prefix;
    return order;
}

Batch pick(const ResidualOrder& order, std::size_t n, const Batch& all) {
    if (n < 1 || n > order.perm.size() || order.perm.size() != all.size()) {
        throw InvalidInputError("pick: n out of range");
    }
    Batch batch;
    batch.instances.reserve(n);
    batch.index_set.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t pos = order.perm[c];
        batch.instances.push_back(all.instances[pos]);
        batch.index_set.push_back(all.index_set.empty() ? pos : all.index_set[pos]);
    }
    return batch;
}

}  // namespace plm
