// SPDX-License-Identifier: Apache-2.0
#include "plm/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "plm/agdo.hpp"
#include "plm/errors.hpp"
#include "plm/rng.hpp"

namespace plm {

namespace {
constexpr std::uint64_t kBackpropInitStream = 21;
}

double LinearModel::predict(std::span<const double> x) const {
    if (x.size() + 1 != coefficients.size()) {
        throw InvalidInputError("linear model dimension mismatch");
    }
    double f = coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) f += coefficients[j + 1] * x[j];
    return f;
}

LinearModel fit_linear(const Dataset& train) {
    if (train.size() == 0) throw InvalidInputError("fit_linear over an empty dataset");
    const std::size_t n = train.size();
    const std::size_t m = train.features();

    Eigen::MatrixXd design(n, m + 1);
    Eigen::VectorXd target(n);
    for (std::size_t r = 0; r < n; ++r) {
        design(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j + 1)) =
                train.X[r][j];
        }
        target(static_cast<Eigen::Index>(r)) = train.y[r];
    }

    // Complete orthogonal decomposition: rank-revealing, and the solve is
    // minimum-norm when columns are linearly dependent.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::VectorXd beta = cod.solve(target);

    LinearModel model;
    model.rank_deficient = cod.rank() < static_cast<Eigen::Index>(m + 1);
    model.coefficients.assign(beta.data(), beta.data() + beta.size());
    for (double c : model.coefficients) {
        if (!std::isfinite(c)) throw InvalidStateError("linear fit produced non-finite terms");
    }
    return model;
}

TwoLayerNet fit_backprop_2lnn(const Dataset& train, std::size_t p_fixed, std::size_t epochs,
                              std::uint64_t seed, double eta) {
    if (p_fixed < 1) throw InvalidInputError("p_fixed must be >= 1");
    if (train.size() == 0) throw InvalidInputError("fit_backprop_2lnn over an empty dataset");

    Rng rng = Rng::stream(seed, kBackpropInitStream);
    TwoLayerNet net = TwoLayerNet::random_init(train.features(), p_fixed, rng);
    if (epochs == 0) return net;

    const Batch batch = to_batch(train);
    TwoLayerNet best = net;
    double best_loss = loss_trimmed_mse(net, batch);

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-8;
    std::vector<double> m1(net.param_count(), 0.0);
    std::vector<double> m2(net.param_count(), 0.0);
    std::vector<double> grad;

    for (std::size_t t = 1; t <= epochs; ++t) {
        gradient_into(net, batch, 0.0, grad);
        const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
            m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
            net.param(i) -= eta * (m1[i] / corr1) / (std::sqrt(m2[i] / corr2) + adam_eps);
        }
        if (!net.all_finite()) break;
        const double cur = loss_trimmed_mse(net, batch);
        if (std::isfinite(cur) && cur < best_loss) {
            best = net;
            best_loss = cur;
        }
    }
    return best;
}

double mae(const std::function<double(std::span<const double>)>& predict, const Dataset& ds) {
    if (ds.size() == 0) throw InvalidInputError("mae over an empty dataset");
    double s = 0.0;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        s += std::abs(predict(ds.X[r]) - ds.y[r]);
    }
    return s / static_cast<double>(ds.size());
}

MajoritySplitMae mae_majority_split(const TwoLayerNet& net, const Dataset& train,
                                    std::size_t majority_count) {
    const std::size_t n = train.size();
    if (majority_count < 1 || majority_count > n) {
        throw InvalidInputError("majority_count out of range");
    }

    std::vector<double> abs_err(n);
    for (std::size_t r = 0; r < n; ++r) abs_err[r] = std::abs(net.forward(train.X[r]) - train.y[r]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return abs_err[a] * abs_err[a] < abs_err[b] * abs_err[b];
    });

    MajoritySplitMae out;
    double s = 0.0;
    for (std::size_t i = 0; i < majority_count; ++i) s += abs_err[order[i]];
    out.majority = s / static_cast<double>(majority_count);
    if (majority_count < n) {
        double t = 0.0;
        for (std::size_t i = majority_count; i < n; ++i) t += abs_err[order[i]];
        out.non_majority = t / static_cast<double>(n - majority_count);
    }
    return out;
}

}  // namespace plm
