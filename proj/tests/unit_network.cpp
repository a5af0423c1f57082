// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "plm/errors.hpp"
#include "plm/network.hpp"
#include "plm/rng.hpp"
#include "test_support.hpp"

using namespace plm;
using namespace plm::test;

namespace {

TwoLayerNet small_net(std::size_t m, const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& out) {
    TwoLayerNet net(m, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto row = net.hidden_row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = rows[i][j];
    }
    auto o = net.output_layer();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = out[j];
    return net;
}

}  // namespace

TEST_CASE("hidden activations are ReLU of the affine preactivation") {
    const TwoLayerNet net = small_net(1, {{0.0, 1.0}}, {0.0, 1.0});
    CHECK(net.hidden_activations(std::vector<double>{2.0})[0] == 2.0);
    CHECK(net.hidden_activations(std::vector<double>{-3.0})[0] == 0.0);

    const TwoLayerNet bias_only = small_net(2, {{1.0, 0.0, 0.0}}, {0.0, 0.0});
    CHECK(bias_only.hidden_activations(std::vector<double>{7.0, -4.0})[0] == 1.0);
}

TEST_CASE("forward sums the output bias and weighted activations") {
    CHECK(small_net(1, {{0.0, 1.0}}, {0.0, 1.0}).forward(std::vector<double>{2.0}) == 2.0);
    CHECK(small_net(1, {{0.0, 1.0}}, {5.0, 0.0}).forward(std::vector<double>{7.0}) == 5.0);
    const TwoLayerNet two = small_net(1, {{0.0, 1.0}, {0.0, -1.0}}, {0.0, 1.0, 1.0});
    CHECK(two.forward(std::vector<double>{-3.0}) == 3.0);
}

TEST_CASE("dimension mismatch raises invalid input") {
    const TwoLayerNet net = small_net(2, {{0.0, 1.0, 1.0}}, {0.0, 1.0});
    CHECK_THROWS_AS((void)net.forward(std::vector<double>{1.0}), InvalidInputError);
    CHECK_THROWS_AS((void)net.hidden_activations(std::vector<double>{1.0, 2.0, 3.0}),
                    InvalidInputError);
}

TEST_CASE("residual is forward minus target") {
    const TwoLayerNet net = constant_net(1, 2.0);
    CHECK(net.residual({{0.5}, 2.0}) == 0.0);
    CHECK(net.residual({{0.5}, 1.9}) == doctest::Approx(0.1));
    const TwoLayerNet zero = constant_net(1, 0.0);
    CHECK(zero.residual({{0.5}, 1.0}) == -1.0);
}

TEST_CASE("trimmed mse averages squared residuals") {
    const TwoLayerNet net = constant_net(1, 0.0);
    CHECK(loss_trimmed_mse(net, make_batch({{1.0}}, {-0.1})) == doctest::Approx(0.01));
    CHECK(loss_trimmed_mse(net, make_batch({{1.0}, {2.0}}, {0.0, -0.2})) ==
          doctest::Approx(0.02));
    CHECK(loss_trimmed_mse(net, make_batch({{1.0}, {2.0}}, {0.0, 0.0})) == 0.0);
    CHECK_THROWS_AS((void)loss_trimmed_mse(net, Batch{}), InvalidInputError);
}

TEST_CASE("regularized loss adds the squared weight norm") {
    TwoLayerNet net(2, 1);
    net.output_layer()[0] = 1.0;
    const Batch one = make_batch({{0.3, 0.4}}, {1.0});
    CHECK(loss_regularized(net, one, 0.0) == loss_trimmed_mse(net, one));
    CHECK(loss_regularized(net, one, 1.0) == doctest::Approx(1.0));

    // ||w||^2 = 4 and mse = 0.02.
    const TwoLayerNet four = small_net(1, {{1.0, 1.0}}, {1.0, 1.0});
    const Batch dead = make_batch({{-5.0}}, {1.0 - std::sqrt(0.02)});
    CHECK(four.weight_sq_norm() == 4.0);
    CHECK(loss_regularized(four, dead, 0.5) == doctest::Approx(2.02));
}

TEST_CASE("regularized loss with lambda zero equals trimmed mse exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const TwoLayerNet net = random_net(3, 4, rng);
        const Batch batch = random_batch(6, 3, rng);
        CHECK(loss_regularized(net, batch, 0.0) == loss_trimmed_mse(net, batch));
    }
}

TEST_CASE("gradient single-term chain rule") {
    const TwoLayerNet net = small_net(1, {{0.0, 1.0}}, {0.0, 1.0});
    const Batch batch = make_batch({{2.0}}, {0.0});
    const auto g = gradient(net, batch, 0.0);
    // Flat layout: hidden (bias, w11), output (bias, v1).
    CHECK(g[3] == doctest::Approx(8.0));  // dL/dv1 = 2 e a = 2*2*2
    CHECK(g[2] == doctest::Approx(4.0));  // dL/db_out = 2 e
    CHECK(g[0] == doctest::Approx(4.0));  // dL/db_1 = 2 e v1
    CHECK(g[1] == doctest::Approx(8.0));  // dL/dw11 = 2 e v1 x
}

TEST_CASE("dead hidden node receives zero gradient") {
    TwoLayerNet net = small_net(1, {{-10.0, 1.0}}, {0.0, 3.0});
    const Batch batch = make_batch({{1.0}, {2.0}}, {1.0, 2.0});
    const auto g = gradient(net, batch, 0.0);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    CHECK(g[3] == 0.0);  // activation is zero, so dL/dv1 = 0 too
    CHECK(g[2] != 0.0);  // output bias still learns
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(42);
    int checked = 0;
    while (checked < 8) {
        const TwoLayerNet net = random_net(3, 4, rng);
        const Batch batch = random_batch(10, 3, rng);
        if (min_preactivation(net, batch) < 1e-4) continue;  // stay clear of kinks
        ++checked;
        for (const double lambda : {0.0, 0.37}) {
            const auto analytic = gradient(net, batch, lambda);
            const auto numeric = finite_difference_gradient(net, batch, lambda);
            for (std::size_t i = 0; i < analytic.size(); ++i) {
                const double tol = 1e-5 * std::max(1.0, std::abs(numeric[i]));
                CHECK(std::abs(analytic[i] - numeric[i]) <= tol);
            }
        }
    }
}

TEST_CASE("append and remove hidden nodes") {
    Rng rng(3);
    const TwoLayerNet net = random_net(2, 2, rng);

    SUBCASE("appending zero nodes is the identity") {
        CHECK(add_hidden_nodes(net, {}, {}) == net);
    }
    SUBCASE("a zero-output-weight node never changes forward") {
        const TwoLayerNet grown = add_hidden_nodes(net, {{0.5, 1.0, -1.0}}, {0.0});
        for (int i = 0; i < 50; ++i) {
            const std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            CHECK(grown.forward(x) == net.forward(x));
        }
    }
    SUBCASE("removing an appended node restores the original net exactly") {
        const TwoLayerNet grown = add_hidden_nodes(net, {{0.5, 1.0, -1.0}}, {0.7});
        CHECK(grown.hidden_nodes() == 3);
        CHECK(remove_hidden_node(grown, 2) == net);
    }
    SUBCASE("removing from a two-node net keeps the other node intact") {
        const TwoLayerNet shrunk = remove_hidden_node(net, 1);
        CHECK(shrunk.hidden_nodes() == 1);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(shrunk.hidden_row(0)[j] == net.hidden_row(0)[j]);
        }
        CHECK(shrunk.output_weight(0) == net.output_weight(0));
        CHECK(shrunk.output_layer()[0] == net.output_layer()[0]);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS((void)remove_hidden_node(net, 2), InvalidInputError);
        const TwoLayerNet single = constant_net(2, 0.0);
        CHECK_THROWS_AS((void)remove_hidden_node(single, 0), InvalidStateError);
        CHECK_THROWS_AS((void)add_hidden_nodes(net, {{1.0, 2.0}}, {0.0}), InvalidInputError);
    }
}

TEST_CASE("forward is piecewise linear along any line") {
    Rng rng(11);
    const TwoLayerNet net = random_net(3, 5, rng);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> x0(3);
        std::vector<double> dir(3);
        for (double& v : x0) v = rng.uniform(-1.0, 1.0);
        for (double& v : dir) v = rng.uniform(-1.0, 1.0);

        const int steps = 2000;
        const double dt = 4.0 / steps;
        std::vector<double> vals(steps + 1);
        for (int s = 0; s <= steps; ++s) {
            std::vector<double> x(3);
            for (int j = 0; j < 3; ++j) x[j] = x0[j] + (-2.0 + s * dt) * dir[j];
            vals[s] = net.forward(x);
        }
        // One kink per hidden node; a kink that falls between samples makes
        // the two adjacent sample slopes differ, so at most 2p slope breaks.
        // Everywhere else the sampled second difference is numerical noise.
        int slope_changes = 0;
        double prev_slope = (vals[1] - vals[0]) / dt;
        for (int s = 2; s <= steps; ++s) {
            const double slope = (vals[s] - vals[s - 1]) / dt;
            if (std::abs(slope - prev_slope) > 1e-7 * (1.0 + std::abs(prev_slope))) {
                ++slope_changes;
            }
            prev_slope = slope;
        }
        CHECK(slope_changes <= 2 * 5);
    }
}

TEST_CASE("snapshot round trip is bit exact") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const TwoLayerNet net = random_net(1 + trial % 4, 1 + trial % 3, rng, 1e3);
        std::stringstream buffer;
        save_network(net, buffer);
        CHECK(load_network(buffer) == net);
    }
}

TEST_CASE("snapshot header and payload are validated") {
    std::stringstream bad_header("0 1\n");
    CHECK_THROWS_AS((void)load_network(bad_header), ParseError);
    std::stringstream truncated("1 1\n0.5 0.25\n");
    CHECK_THROWS_AS((void)load_network(truncated), ParseError);
    std::stringstream garbage("1 1\n0.5 x\n1 2\n");
    CHECK_THROWS_AS((void)load_network(garbage), ParseError);
}

TEST_CASE("weights stay finite through structural edits") {
    Rng rng(5);
    TwoLayerNet net = random_net(2, 1, rng);
    net = add_hidden_nodes(net, {{1e15, -1e15, 1e15}}, {1e15});
    CHECK(net.all_finite());
    net = remove_hidden_node(net, 1);
    CHECK(net.all_finite());
}
