// SPDX-License-Identifier: Apache-2.0
#include "plm/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "plm/errors.hpp"
#include "plm/rng.hpp"

namespace plm {

TwoLayerNet::TwoLayerNet(std::size_t inputs, std::size_t hidden_nodes)
    : m_(inputs), p_(hidden_nodes) {
    if (hidden_nodes < 1) {
        throw InvalidInputError("TwoLayerNet requires at least one hidden node");
    }
    hidden_.assign(p_ * (m_ + 1), 0.0);
    output_.assign(p_ + 1, 0.0);
}

TwoLayerNet TwoLayerNet::random_init(std::size_t inputs, std::size_t hidden_nodes, Rng& rng,
                                     double half_range) {
    TwoLayerNet net(inputs, hidden_nodes);
    for (double& w : net.hidden_) w = rng.uniform(-half_range, half_range);
    for (double& w : net.output_) w = rng.uniform(-half_range, half_range);
    return net;
}

std::span<const double> TwoLayerNet::hidden_row(std::size_t i) const {
    if (i >= p_) throw InvalidInputError("hidden node index out of range");
    return {hidden_.data() + i * (m_ + 1), m_ + 1};
}

std::span<double> TwoLayerNet::hidden_row(std::size_t i) {
    if (i >= p_) throw InvalidInputError("hidden node index out of range");
    return {hidden_.data() + i * (m_ + 1), m_ + 1};
}

double TwoLayerNet::param(std::size_t i) const {
    return i < hidden_.size() ? hidden_[i] : output_[i - hidden_.size()];
}

double& TwoLayerNet::param(std::size_t i) {
    return i < hidden_.size() ? hidden_[i] : output_[i - hidden_.size()];
}

double TwoLayerNet::weight_sq_norm() const {
    double s = 0.0;
    for (double w : hidden_) s += w * w;
    for (double w : output_) s += w * w;
    return s;
}

bool TwoLayerNet::all_finite() const {
    for (double w : hidden_) {
        if (!std::isfinite(w)) return false;
    }
    for (double w : output_) {
        if (!std::isfinite(w)) return false;
    }
    return true;
}

void TwoLayerNet::check_input(std::span<const double> x) const {
    if (x.size() != m_) {
        throw InvalidInputError("input has " + std::to_string(x.size()) +
                                " components, network expects " + std::to_string(m_));
    }
}

std::vector<double> TwoLayerNet::hidden_activations(std::span<const double> x) const {
    std::vector<double> out(p_);
    hidden_activations_into(x, out);
    return out;
}

void TwoLayerNet::hidden_activations_into(std::span<const double> x, std::span<double> out) const {
    check_input(x);
    if (out.size() != p_) throw InvalidInputError("activation buffer has wrong length");
    const double* row = hidden_.data();
    for (std::size_t i = 0; i < p_; ++i, row += m_ + 1) {
        double z = row[0];
        for (std::size_t j = 0; j < m_; ++j) z += row[j + 1] * x[j];
        out[i] = z > 0.0 ? z : 0.0;
    }
}

double TwoLayerNet::forward(std::span<const double> x) const {
    check_input(x);
    double f = output_[0];
    const double* row = hidden_.data();
    for (std::size_t i = 0; i < p_; ++i, row += m_ + 1) {
        double z = row[0];
        for (std::size_t j = 0; j < m_; ++j) z += row[j + 1] * x[j];
        if (z > 0.0) f += output_[i + 1] * z;
    }
    return f;
}

double TwoLayerNet::residual(const Instance& inst) const { return forward(inst.x) - inst.y; }

double loss_trimmed_mse(const TwoLayerNet& net, const Batch& batch) {
    if (batch.empty()) throw InvalidInputError("loss over an empty batch");
    double s = 0.0;
    for (const Instance& inst : batch.instances) {
        const double e = net.residual(inst);
        s += e * e;
    }
    return s / static_cast<double>(batch.size());
}

double loss_regularized(const TwoLayerNet& net, const Batch& batch, double lambda) {
    if (lambda < 0.0) throw InvalidInputError("regularization coefficient must be >= 0");
    if (lambda == 0.0) return loss_trimmed_mse(net, batch);
    return loss_trimmed_mse(net, batch) + lambda * net.weight_sq_norm();
}

void gradient_into(const TwoLayerNet& net, const Batch& batch, double lambda,
                   std::vector<double>& out) {
    if (batch.empty()) throw InvalidInputError("gradient over an empty batch");
    if (lambda < 0.0) throw InvalidInputError("regularization coefficient must be >= 0");

    const std::size_t m = net.inputs();
    const std::size_t p = net.hidden_nodes();
    const std::size_t hidden_size = p * (m + 1);
    out.assign(net.param_count(), 0.0);

    double* g_hidden = out.data();
    double* g_output = out.data() + hidden_size;
    const double* hidden = net.hidden_.data();
    const double* output = net.output_.data();

    // Hot path: one preactivation pass per instance, activations cached.
    // The ReLU subgradient at exactly 0 is 0 (strict z > 0 test).
    static thread_local std::vector<double> acts;
    acts.resize(p);

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const Instance& inst : batch.instances) {
        if (inst.x.size() != m) throw InvalidInputError("batch instance dimension mismatch");
        const double* x = inst.x.data();

        double f = output[0];
        const double* row = hidden;
        for (std::size_t i = 0; i < p; ++i, row += m + 1) {
            double z = row[0];
            for (std::size_t j = 0; j < m; ++j) z += row[j + 1] * x[j];
            acts[i] = z;
            if (z > 0.0) f += output[i + 1] * z;
        }
        const double scale = 2.0 * (f - inst.y) * inv_n;

        g_output[0] += scale;
        for (std::size_t i = 0; i < p; ++i) {
            const double z = acts[i];
            if (z > 0.0) {
                g_output[i + 1] += scale * z;
                const double back = scale * output[i + 1];
                double* g_row = g_hidden + i * (m + 1);
                g_row[0] += back;
                for (std::size_t j = 0; j < m; ++j) g_row[j + 1] += back * x[j];
            }
        }
    }

    if (lambda > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 * lambda * net.param(i);
    }
}

std::vector<double> gradient(const TwoLayerNet& net, const Batch& batch, double lambda) {
    std::vector<double> out;
    gradient_into(net, batch, lambda, out);
    return out;
}

TwoLayerNet add_hidden_nodes(const TwoLayerNet& net,
                             const std::vector<std::vector<double>>& new_hidden_rows,
                             const std::vector<double>& new_output_weights) {
    if (new_hidden_rows.size() != new_output_weights.size()) {
        throw InvalidInputError("row count and output weight count differ");
    }
    for (const auto& row : new_hidden_rows) {
        if (row.size() != net.inputs() + 1) {
            throw InvalidInputError("new hidden row width must be m + 1");
        }
    }
    TwoLayerNet grown = net;
    grown.p_ += new_hidden_rows.size();
    for (const auto& row : new_hidden_rows) {
        grown.hidden_.insert(grown.hidden_.end(), row.begin(), row.end());
    }
    grown.output_.insert(grown.output_.end(), new_output_weights.begin(),
                         new_output_weights.end());
    return grown;
}

TwoLayerNet remove_hidden_node(const TwoLayerNet& net, std::size_t k) {
    if (k >= net.hidden_nodes()) throw InvalidInputError("hidden node index out of range");
    if (net.hidden_nodes() < 2) {
        throw InvalidStateError("cannot remove the only hidden node");
    }
    TwoLayerNet shrunk = net;
    const std::size_t width = net.inputs() + 1;
    const auto row_begin = shrunk.hidden_.begin() + static_cast<std::ptrdiff_t>(k * width);
    shrunk.hidden_.erase(row_begin, row_begin + static_cast<std::ptrdiff_t>(width));
    shrunk.output_.erase(shrunk.output_.begin() + static_cast<std::ptrdiff_t>(k + 1));
    shrunk.p_ -= 1;
    return shrunk;
}

namespace {

void write_value(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

double read_value(std::istream& in, const char* what) {
    double v = 0.0;
    if (!(in >> v)) throw ParseError(std::string("network snapshot: expected ") + what);
    return v;
}

}  // namespace

void save_network(const TwoLayerNet& net, std::ostream& out) {
    out << net.inputs() << ' ' << net.hidden_nodes() << '\n';
    for (std::size_t i = 0; i < net.hidden_nodes(); ++i) {
        const auto row = net.hidden_row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ' ';
            write_value(out, row[j]);
        }
        out << '\n';
    }
    const auto outw = net.output_layer();
    for (std::size_t j = 0; j < outw.size(); ++j) {
        if (j) out << ' ';
        write_value(out, outw[j]);
    }
    out << '\n';
}

void save_network(const TwoLayerNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    save_network(net, out);
}

TwoLayerNet load_network(std::istream& in) {
    long long m = -1;
    long long p = -1;
    if (!(in >> m >> p) || m < 1 || p < 1) {
        throw ParseError("network snapshot: bad header, expected \"m p\"");
    }
    TwoLayerNet net(static_cast<std::size_t>(m), static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < net.hidden_nodes(); ++i) {
        auto row = net.hidden_row(i);
        for (double& w : row) w = read_value(in, "hidden weight");
    }
    for (double& w : net.output_layer()) w = read_value(in, "output weight");
    return net;
}

TwoLayerNet load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return load_network(in);
}

}  // namespace plm
