// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plm {

class Rng;

/// One training instance: input vector and desired scalar output.
struct Instance {
    std::vector<double> x;
    double y = 0.0;
};

/// An ordered list of instances together with their original dataset indices.
/// `index_set` is parallel to `instances` and holds each instance's identity
/// in the full dataset it was drawn from.
struct Batch {
    std::vector<Instance> instances;
    std::vector<std::size_t> index_set;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }
};

/// Two-layer network: `p` ReLU hidden nodes over `m` inputs feeding one
/// linear output node.
///
///     f(x) = b_out + sum_i v_i * ReLU(b_i + w_i . x)
///
/// Hidden row i stores (b_i, w_i1, ..., w_im); the output layer stores
/// (b_out, v_1, ..., v_p). All weights are 64-bit doubles: structural edits
/// (cramming) divide by tiny offsets, and the exactness guarantee would not
/// survive single precision.
///
/// Parameters are also addressable as one flat vector -- hidden rows first
/// (row-major), then the output layer -- which is the layout shared by
/// gradient(), the Adam stepper, and finite-difference checks.
///
/// The net is a plain value: evaluation is const and safe to share across
/// threads; mutation requires exclusive access.
class TwoLayerNet {
public:
    /// A net with all weights zero. `hidden_nodes` must be >= 1.
    TwoLayerNet(std::size_t inputs, std::size_t hidden_nodes);

    /// A net with every weight drawn uniformly from [-half_range, half_range].
    /// Draw order: hidden rows in index order, then the output layer.
    static TwoLayerNet random_init(std::size_t inputs, std::size_t hidden_nodes, Rng& rng,
                                   double half_range = 0.5);

    std::size_t inputs() const { return m_; }
    std::size_t hidden_nodes() const { return p_; }

    std::span<const double> hidden_row(std::size_t i) const;
    std::span<double> hidden_row(std::size_t i);
    std::span<const double> output_layer() const { return output_; }
    std::span<double> output_layer() { return output_; }
    double output_bias() const { return output_[0]; }
    double output_weight(std::size_t i) const { return output_[i + 1]; }

    /// Flat parameter view: hidden rows row-major, then the output layer.
    std::size_t param_count() const { return hidden_.size() + output_.size(); }
    double param(std::size_t i) const;
    double& param(std::size_t i);

    /// Sum of squares of every weight and bias (the Eq.-style penalty term).
    double weight_sq_norm() const;
    bool all_finite() const;

    /// ReLU activations of all hidden nodes at input x (length p).
    std::vector<double> hidden_activations(std::span<const double> x) const;
    void hidden_activations_into(std::span<const double> x, std::span<double> out) const;

    /// Network output at x.
    double forward(std::span<const double> x) const;

    /// forward(x) - y.
    double residual(const Instance& inst) const;

    bool operator==(const TwoLayerNet& other) const = default;

private:
    void check_input(std::span<const double> x) const;

    std::size_t m_;
    std::size_t p_;
    std::vector<double> hidden_;  // p rows of (m + 1), bias first
    std::vector<double> output_;  // (p + 1), bias first

    friend TwoLayerNet add_hidden_nodes(const TwoLayerNet&,
                                        const std::vector<std::vector<double>>&,
                                        const std::vector<double>&);
    friend TwoLayerNet remove_hidden_node(const TwoLayerNet&, std::size_t);
    friend void gradient_into(const TwoLayerNet&, const Batch&, double, std::vector<double>&);
};

/// Mean squared residual over the batch: sum_c (f(x^c) - y^c)^2 / n.
double loss_trimmed_mse(const TwoLayerNet& net, const Batch& batch);

/// loss_trimmed_mse + lambda * ||w||^2 (biases included in the norm).
double loss_regularized(const TwoLayerNet& net, const Batch& batch, double lambda);

/// Analytic gradient of loss_regularized w.r.t. every parameter, in the
/// flat layout of TwoLayerNet::param(). The ReLU subgradient at exactly 0
/// is taken as 0. lambda = 0 gives the gradient of loss_trimmed_mse.
void gradient_into(const TwoLayerNet& net, const Batch& batch, double lambda,
                   std::vector<double>& out);
std::vector<double> gradient(const TwoLayerNet& net, const Batch& batch, double lambda);

/// Returns a copy of `net` with `new_hidden_rows` appended (each of width
/// m + 1, bias first) and the matching output weights appended. Existing
/// parameters are untouched.
TwoLayerNet add_hidden_nodes(const TwoLayerNet& net,
                             const std::vector<std::vector<double>>& new_hidden_rows,
                             const std::vector<double>& new_output_weights);

/// Returns a copy of `net` with hidden node k (0-based) deleted; indices of
/// later nodes shift down by one. Requires p >= 2.
TwoLayerNet remove_hidden_node(const TwoLayerNet& net, std::size_t k);

/// Plain-text snapshot: header line "m p", then p hidden rows of m + 1
/// decimal floats, then one output row of p + 1 floats. Values carry 17
/// significant digits so the round trip is bit-exact.
void save_network(const TwoLayerNet& net, std::ostream& out);
void save_network(const TwoLayerNet& net, const std::string& path);
TwoLayerNet load_network(std::istream& in);
TwoLayerNet load_network(const std::string& path);

}  // namespace plm
