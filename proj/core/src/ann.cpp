#include "fxcast/ann.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "fxcast/common.hpp"
#include "fxcast/rng.hpp"

namespace fxcast {

// ===========================================================================
// Spec / network plumbing
// ===========================================================================

void NetworkSpec::validate() const {
    if (input_count < 1 || output_count < 1) {
        throw std::invalid_argument("network spec counts must be >= 1");
    }
    if (hidden_layer_sizes.empty()) {
        throw std::invalid_argument("network spec needs at least one hidden layer");
    }
    for (int h : hidden_layer_sizes) {
        if (h < 1) throw std::invalid_argument("hidden layer size must be >= 1");
    }
    if (hidden_activation != Activation::Tansig || output_activation != Activation::Purelin) {
        throw std::invalid_argument("supported activations: tansig hidden, purelin output");
    }
}

namespace {

std::string activation_name(Activation a) {
    return a == Activation::Tansig ? "tansig" : "purelin";
}

Activation activation_from_name(const std::string& s) {
    if (s == "tansig") return Activation::Tansig;
    if (s == "purelin") return Activation::Purelin;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

std::vector<int> layer_output_sizes(const NetworkSpec& spec) {
    std::vector<int> sizes = spec.hidden_layer_sizes;
    sizes.push_back(spec.output_count);
    return sizes;
}

std::vector<int> layer_input_sizes(const NetworkSpec& spec) {
    std::vector<int> sizes{spec.input_count};
    sizes.insert(sizes.end(), spec.hidden_layer_sizes.begin(), spec.hidden_layer_sizes.end());
    return sizes;
}

}  // namespace

nlohmann::json NetworkSpec::to_json() const {
    return {{"input_count", input_count},
            {"hidden_layer_sizes", hidden_layer_sizes},
            {"output_count", output_count},
            {"hidden_activation", activation_name(hidden_activation)},
            {"output_activation", activation_name(output_activation)}};
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
    NetworkSpec spec;
    spec.input_count = j.at("input_count").get<int>();
    spec.hidden_layer_sizes = j.at("hidden_layer_sizes").get<std::vector<int>>();
    spec.output_count = j.at("output_count").get<int>();
    spec.hidden_activation = activation_from_name(j.at("hidden_activation").get<std::string>());
    spec.output_activation = activation_from_name(j.at("output_activation").get<std::string>());
    spec.validate();
    return spec;
}

int Network::parameter_count() const {
    int count = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        count += static_cast<int>(weights[l].size() + biases[l].size());
    }
    return count;
}

nlohmann::json Network::to_json() const {
    nlohmann::json jw = nlohmann::json::array();
    nlohmann::json jb = nlohmann::json::array();
    for (std::size_t l = 0; l < weights.size(); ++l) {
        nlohmann::json rows = nlohmann::json::array();
        for (long r = 0; r < weights[l].rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (long c = 0; c < weights[l].cols(); ++c) row.push_back(weights[l](r, c));
            rows.push_back(std::move(row));
        }
        jw.push_back(std::move(rows));
        nlohmann::json bias = nlohmann::json::array();
        for (long r = 0; r < biases[l].size(); ++r) bias.push_back(biases[l](r));
        jb.push_back(std::move(bias));
    }
    return {{"format_version", 1},
            {"spec", spec.to_json()},
            {"seed", rng_seed},
            {"weights", std::move(jw)},
            {"biases", std::move(jb)}};
}

Network Network::from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != 1) {
        throw std::invalid_argument("unsupported network format_version");
    }
    Network net;
    net.spec = NetworkSpec::from_json(j.at("spec"));
    net.rng_seed = j.at("seed").get<std::uint64_t>();
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    const auto in_sizes = layer_input_sizes(net.spec);
    const auto out_sizes = layer_output_sizes(net.spec);
    if (jw.size() != out_sizes.size() || jb.size() != out_sizes.size()) {
        throw std::invalid_argument("network json: wrong layer count");
    }
    for (std::size_t l = 0; l < out_sizes.size(); ++l) {
        Eigen::MatrixXd w(out_sizes[l], in_sizes[l]);
        if (static_cast<long>(jw[l].size()) != w.rows()) {
            throw std::invalid_argument("network json: wrong weight shape");
        }
        for (long r = 0; r < w.rows(); ++r) {
            if (static_cast<long>(jw[l][r].size()) != w.cols()) {
                throw std::invalid_argument("network json: wrong weight shape");
            }
            for (long c = 0; c < w.cols(); ++c) w(r, c) = jw[l][r][c].get<double>();
        }
        Eigen::VectorXd b(out_sizes[l]);
        if (static_cast<long>(jb[l].size()) != b.size()) {
            throw std::invalid_argument("network json: wrong bias shape");
        }
        for (long r = 0; r < b.size(); ++r) b(r) = jb[l][r].get<double>();
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

Network init_network(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Network net;
    net.spec = spec;
    net.rng_seed = seed;
    Rng rng(seed);
    const auto in_sizes = layer_input_sizes(spec);
    const auto out_sizes = layer_output_sizes(spec);
    for (std::size_t l = 0; l < out_sizes.size(); ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(in_sizes[l]));
        Eigen::MatrixXd w(out_sizes[l], in_sizes[l]);
        // Column-major draw order keeps the stream layout identical to the
        // flat parameter packing.
        for (long c = 0; c < w.cols(); ++c) {
            for (long r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-0.5, 0.5) * scale;
        }
        Eigen::VectorXd b(out_sizes[l]);
        for (long r = 0; r < b.size(); ++r) b(r) = rng.uniform(-0.5, 0.5) * scale;
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

// ===========================================================================
// Forward / gradient / Jacobian
// ===========================================================================

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input) {
    if (input.size() != net.spec.input_count) {
        throw std::invalid_argument("forward: input length mismatch");
    }
    Eigen::VectorXd a = input;
    const std::size_t layers = net.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        a = (net.weights[l] * a + net.biases[l]).eval();
        if (l + 1 < layers) a = a.array().tanh();
    }
    return a;
}

namespace {

// Batch forward keeping every layer's activation (rows = samples).
std::vector<Eigen::MatrixXd> forward_activations(const Network& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.spec.input_count) {
        throw std::invalid_argument("batch forward: input width mismatch");
    }
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(net.weights.size() + 1);
    acts.push_back(x);
    const std::size_t layers = net.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = acts.back() * net.weights[l].transpose();
        z.rowwise() += net.biases[l].transpose();
        if (l + 1 < layers) z = z.array().tanh();
        acts.push_back(std::move(z));
    }
    return acts;
}

void check_batch(const Network& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() == 0) throw std::invalid_argument("empty batch");
    if (x.rows() != y.rows()) throw std::invalid_argument("input/target row mismatch");
    if (x.cols() != net.spec.input_count || y.cols() != net.spec.output_count) {
        throw std::invalid_argument("batch width mismatch");
    }
}

}  // namespace

Eigen::MatrixXd predict(const Network& net, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != net.spec.input_count) {
        throw std::invalid_argument("predict: input width mismatch");
    }
    Eigen::MatrixXd a = inputs;
    const std::size_t layers = net.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = a * net.weights[l].transpose();
        z.rowwise() += net.biases[l].transpose();
        if (l + 1 < layers) z = z.array().tanh();
        a = std::move(z);
    }
    return a;
}

double batch_mse(const Network& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets) {
    check_batch(net, inputs, targets);
    const Eigen::MatrixXd out = predict(net, inputs);
    return (out - targets).squaredNorm() / static_cast<double>(out.size());
}

Eigen::VectorXd pack_parameters(const Network& net) {
    Eigen::VectorXd params(net.parameter_count());
    long pos = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const auto& w = net.weights[l];
        params.segment(pos, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        pos += w.size();
        params.segment(pos, net.biases[l].size()) = net.biases[l];
        pos += net.biases[l].size();
    }
    return params;
}

void unpack_parameters(Network& net, const Eigen::VectorXd& params) {
    if (params.size() != net.parameter_count()) {
        throw std::invalid_argument("parameter vector size mismatch");
    }
    long pos = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        auto& w = net.weights[l];
        Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = params.segment(pos, w.size());
        pos += w.size();
        net.biases[l] = params.segment(pos, net.biases[l].size());
        pos += net.biases[l].size();
    }
}

Eigen::VectorXd gradient(const Network& net, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets) {
    check_batch(net, inputs, targets);
    const auto acts = forward_activations(net, inputs);
    const std::size_t layers = net.weights.size();
    const double scale = 2.0 / static_cast<double>(acts.back().size());

    Eigen::VectorXd grad(net.parameter_count());
    // dZ for the output layer; purelin derivative is 1.
    Eigen::MatrixXd dz = scale * (acts.back() - targets);

    // Layer offsets in the flat vector.
    std::vector<long> offsets(layers);
    long pos = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = pos;
        pos += net.weights[l].size() + net.biases[l].size();
    }

    for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd dw = dz.transpose() * acts[l];
        const Eigen::VectorXd db = dz.colwise().sum();
        grad.segment(offsets[l], dw.size()) =
            Eigen::Map<const Eigen::VectorXd>(dw.data(), dw.size());
        grad.segment(offsets[l] + dw.size(), db.size()) = db;
        if (l > 0) {
            // Back through the tansig of layer l-1: derivative 1 - a^2.
            Eigen::MatrixXd da = dz * net.weights[l];
            dz = da.array() * (1.0 - acts[l].array().square());
        }
    }
    return grad;
}

Eigen::MatrixXd jacobian(const Network& net, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, Eigen::VectorXd* errors) {
    check_batch(net, inputs, targets);
    const long n = inputs.rows();
    const long m = net.spec.output_count;
    const long n_params = net.parameter_count();
    const std::size_t layers = net.weights.size();

    std::vector<long> offsets(layers);
    long pos = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = pos;
        pos += net.weights[l].size() + net.biases[l].size();
    }

    Eigen::MatrixXd jac(n * m, n_params);
    if (errors) errors->resize(n * m);

    std::vector<Eigen::VectorXd> acts(layers + 1);
    for (long i = 0; i < n; ++i) {
        acts[0] = inputs.row(i).transpose();
        for (std::size_t l = 0; l < layers; ++l) {
            acts[l + 1] = net.weights[l] * acts[l] + net.biases[l];
            if (l + 1 < layers) acts[l + 1] = acts[l + 1].array().tanh();
        }
        for (long o = 0; o < m; ++o) {
            const long row = i * m + o;
            if (errors) (*errors)(row) = acts[layers](o) - targets(i, o);
            // Seed the backward pass with d out_o / d z_L = e_o (purelin).
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(m);
            delta(o) = 1.0;
            for (std::size_t l = layers; l-- > 0;) {
                const auto& w = net.weights[l];
                const long rows_l = w.rows();
                const long cols_l = w.cols();
                for (long c = 0; c < cols_l; ++c) {
                    for (long r = 0; r < rows_l; ++r) {
                        jac(row, offsets[l] + c * rows_l + r) = delta(r) * acts[l](c);
                    }
                }
                for (long r = 0; r < rows_l; ++r) {
                    jac(row, offsets[l] + rows_l * cols_l + r) = delta(r);
                }
                if (l > 0) {
                    delta = (w.transpose() * delta).cwiseProduct(
                        (1.0 - acts[l].array().square()).matrix());
                }
            }
        }
    }
    return jac;
}

// ===========================================================================
// Trainers
// ===========================================================================

std::string to_string(Trainer t) {
    switch (t) {
        case Trainer::LM: return "LM";
        case Trainer::SCG: return "SCG";
        case Trainer::CG_PowellBeale: return "CG_PB";
        case Trainer::CG_FletcherReeves: return "CG_FR";
        case Trainer::CG_PolakRibiere: return "CG_PR";
    }
    return "LM";
}

Trainer trainer_from_string(const std::string& s) {
    if (s == "LM") return Trainer::LM;
    if (s == "SCG") return Trainer::SCG;
    if (s == "CG_PB" || s == "CG_PowellBeale") return Trainer::CG_PowellBeale;
    if (s == "CG_FR" || s == "CG_FletcherReeves") return Trainer::CG_FletcherReeves;
    if (s == "CG_PR" || s == "CG_PolakRibiere") return Trainer::CG_PolakRibiere;
    throw std::invalid_argument("unknown trainer '" + s + "'");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Goal: return "goal";
        case StopReason::MaxEpochs: return "max_epochs";
        case StopReason::ValidationFailures: return "validation_failures";
        case StopReason::GradientFloor: return "gradient_floor";
        case StopReason::MuOverflow: return "mu_overflow";
    }
    return "max_epochs";
}

void TrainConfig::validate() const {
    if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
    if (validation_patience < 1) throw std::invalid_argument("validation_patience must be >= 1");
    if (!(mu0 > 0.0)) throw std::invalid_argument("mu0 must be > 0");
    if (!(goal_mse >= 0.0)) throw std::invalid_argument("goal_mse must be >= 0");
}

std::string TrainHistory::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_mse,val_mse,test_mse\n";
    for (std::size_t i = 0; i < train_mse.size(); ++i) {
        out << (i + 1) << ',' << train_mse[i] << ',' << val_mse[i] << ',' << test_mse[i] << '\n';
    }
    return out.str();
}

namespace {

class Stepper {
public:
    virtual ~Stepper() = default;
    /// Advances the network by one epoch. Returns a stop reason when no
    /// further progress is possible (weights untouched in that case).
    virtual std::optional<StopReason> step(Network& net) = 0;
};

class LmStepper : public Stepper {
public:
    LmStepper(const Dataset& data, const TrainConfig& cfg) : data_(data), cfg_(cfg), mu_(cfg.mu0) {}

    std::optional<StopReason> step(Network& net) override {
        Eigen::VectorXd errors;
        const Eigen::MatrixXd jac = jacobian(net, data_.x, data_.y, &errors);
        const double n_err = static_cast<double>(errors.size());
        const Eigen::VectorXd jte = jac.transpose() * errors;
        if ((2.0 / n_err) * jte.norm() < cfg_.gradient_floor) return StopReason::GradientFloor;

        const double sse = errors.squaredNorm();
        if (!std::isfinite(sse)) throw numerical_error("LM: non-finite loss");

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd params = pack_parameters(net);

        while (true) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += mu_;
            const Eigen::VectorXd delta = damped.ldlt().solve(jte);
            bool ok = delta.allFinite();
            double sse_new = std::numeric_limits<double>::infinity();
            if (ok) {
                Network trial = net;
                unpack_parameters(trial, Eigen::VectorXd(params - delta));
                const Eigen::MatrixXd out = predict(trial, data_.x);
                sse_new = (out - data_.y).squaredNorm();
                ok = std::isfinite(sse_new) && sse_new < sse;
                if (ok) {
                    net = std::move(trial);
                    mu_ = std::max(mu_ * cfg_.mu_decrease, 1e-20);
                    return std::nullopt;
                }
            }
            mu_ *= cfg_.mu_increase;
            if (mu_ > cfg_.mu_max) return StopReason::MuOverflow;
        }
    }

private:
    const Dataset& data_;
    const TrainConfig& cfg_;
    double mu_;
};

// Moller's scaled conjugate gradient; no line search.
class ScgStepper : public Stepper {
public:
    ScgStepper(const Dataset& data, const TrainConfig& cfg)
        : data_(data), cfg_(cfg), lambda_(cfg.scg_lambda0) {}

    std::optional<StopReason> step(Network& net) override {
        if (!initialized_) {
            params_ = pack_parameters(net);
            grad_ = gradient(net, data_.x, data_.y);
            f_ = batch_mse(net, data_.x, data_.y);
            if (!std::isfinite(f_)) throw numerical_error("SCG: non-finite loss");
            r_ = -grad_;
            p_ = r_;
            n_params_ = params_.size();
            initialized_ = true;
        }
        if (r_.norm() < cfg_.gradient_floor) return StopReason::GradientFloor;
        if (lambda_ > 1e100) return StopReason::MuOverflow;

        const double p2 = p_.squaredNorm();
        const double pn = std::sqrt(p2);
        if (!(pn > 0.0)) return StopReason::GradientFloor;

        if (success_) {
            const double sigma = cfg_.scg_sigma / pn;
            Network probe = net;
            unpack_parameters(probe, Eigen::VectorXd(params_ + sigma * p_));
            const Eigen::VectorXd grad_probe = gradient(probe, data_.x, data_.y);
            s_ = (grad_probe - grad_) / sigma;
            delta_ = p_.dot(s_);
        }

        delta_ += (lambda_ - lambda_bar_) * p2;
        if (delta_ <= 0.0) {
            lambda_bar_ = 2.0 * (lambda_ - delta_ / p2);
            delta_ = -delta_ + lambda_ * p2;
            lambda_ = lambda_bar_;
        }

        const double mu = p_.dot(r_);
        const double alpha = mu / delta_;

        Network trial = net;
        unpack_parameters(trial, Eigen::VectorXd(params_ + alpha * p_));
        const double f_new = batch_mse(trial, data_.x, data_.y);
        double comparison = -1.0;
        if (std::isfinite(f_new)) comparison = 2.0 * delta_ * (f_ - f_new) / (mu * mu);

        if (comparison >= 0.0) {
            net = std::move(trial);
            params_ += alpha * p_;
            f_ = f_new;
            grad_ = gradient(net, data_.x, data_.y);
            const Eigen::VectorXd r_new = -grad_;
            lambda_bar_ = 0.0;
            success_ = true;
            ++since_restart_;
            if (since_restart_ >= n_params_) {
                p_ = r_new;
                since_restart_ = 0;
            } else {
                const double beta = (r_new.squaredNorm() - r_new.dot(r_)) / mu;
                p_ = r_new + beta * p_;
            }
            r_ = r_new;
            if (comparison >= 0.75) lambda_ *= 0.25;
        } else {
            lambda_bar_ = lambda_;
            success_ = false;
        }
        if (comparison < 0.25) lambda_ += delta_ * (1.0 - comparison) / p2;
        return std::nullopt;
    }

private:
    const Dataset& data_;
    const TrainConfig& cfg_;
    bool initialized_ = false;
    bool success_ = true;
    double lambda_;
    double lambda_bar_ = 0.0;
    double delta_ = 0.0;
    double f_ = 0.0;
    long n_params_ = 0;
    long since_restart_ = 0;
    Eigen::VectorXd params_, grad_, r_, p_, s_;
};

// Fletcher-Reeves / Polak-Ribiere / Powell-Beale conjugate gradient with a
// backtracking (sufficient decrease) line search.
class CgStepper : public Stepper {
public:
    CgStepper(const Dataset& data, const TrainConfig& cfg, Trainer variant)
        : data_(data), cfg_(cfg), variant_(variant) {}

    std::optional<StopReason> step(Network& net) override {
        Eigen::VectorXd grad = gradient(net, data_.x, data_.y);
        if (grad.norm() < cfg_.gradient_floor) return StopReason::GradientFloor;
        const double f0 = batch_mse(net, data_.x, data_.y);
        if (!std::isfinite(f0)) throw numerical_error("CG: non-finite loss");

        Eigen::VectorXd dir;
        bool restarted = false;
        if (!have_prev_ || since_restart_ >= grad.size()) {
            dir = -grad;
            restarted = true;
        } else {
            double beta = 0.0;
            const double prev2 = grad_prev_.squaredNorm();
            switch (variant_) {
                case Trainer::CG_FletcherReeves:
                    beta = grad.squaredNorm() / prev2;
                    break;
                case Trainer::CG_PolakRibiere:
                    beta = std::max(0.0, grad.dot(grad - grad_prev_) / prev2);
                    break;
                case Trainer::CG_PowellBeale: {
                    // Powell's restart criterion: insufficient orthogonality
                    // between successive gradients.
                    if (std::fabs(grad.dot(grad_prev_)) >= 0.2 * grad.squaredNorm()) {
                        beta = 0.0;
                        restarted = true;
                    } else {
                        const Eigen::VectorXd dg = grad - grad_prev_;
                        const double denom = dir_prev_.dot(dg);
                        beta = denom != 0.0 ? grad.dot(dg) / denom : 0.0;
                    }
                    break;
                }
                default:
                    break;
            }
            dir = restarted ? Eigen::VectorXd(-grad) : Eigen::VectorXd(-grad + beta * dir_prev_);
            if (dir.dot(grad) >= 0.0) {  // not a descent direction
                dir = -grad;
                restarted = true;
            }
        }

        const Eigen::VectorXd params = pack_parameters(net);
        double alpha = initial_alpha(grad, dir);
        bool accepted = line_search(net, params, grad, dir, f0, alpha);
        if (!accepted && !restarted) {
            dir = -grad;
            alpha = initial_alpha(grad, dir);
            restarted = true;
            accepted = line_search(net, params, grad, dir, f0, alpha);
        }
        if (!accepted) {
            if (++consecutive_failures_ >= 2) return StopReason::GradientFloor;
            have_prev_ = false;
            return std::nullopt;  // epoch with unchanged weights
        }
        consecutive_failures_ = 0;
        grad_prev_ = grad;
        dir_prev_ = dir;
        alpha_prev_ = alpha;
        slope_prev_ = grad.dot(dir);
        have_prev_ = true;
        since_restart_ = restarted ? 1 : since_restart_ + 1;
        return std::nullopt;
    }

private:
    double initial_alpha(const Eigen::VectorXd& grad, const Eigen::VectorXd& dir) const {
        if (!have_prev_) return 1.0 / (1.0 + grad.norm());
        const double slope = grad.dot(dir);
        if (slope >= 0.0) return alpha_prev_;
        const double scaled = alpha_prev_ * slope_prev_ / slope;
        return std::clamp(scaled, 1e-12, 1e3);
    }

    bool line_search(Network& net, const Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                     const Eigen::VectorXd& dir, double f0, double& alpha) const {
        const double slope = grad.dot(dir);
        Network trial = net;
        for (int i = 0; i <= cfg_.max_halvings; ++i) {
            unpack_parameters(trial, Eigen::VectorXd(params + alpha * dir));
            const double f = batch_mse(trial, data_.x, data_.y);
            if (std::isfinite(f) && f <= f0 + cfg_.armijo_c * alpha * slope) {
                net = std::move(trial);
                return true;
            }
            alpha *= cfg_.backtrack;
        }
        return false;
    }

    const Dataset& data_;
    const TrainConfig& cfg_;
    Trainer variant_;
    bool have_prev_ = false;
    long since_restart_ = 0;
    int consecutive_failures_ = 0;
    double alpha_prev_ = 1.0;
    double slope_prev_ = 0.0;
    Eigen::VectorXd grad_prev_, dir_prev_;
};

std::unique_ptr<Stepper> make_stepper(const Dataset& data, const TrainConfig& cfg) {
    switch (cfg.algorithm) {
        case Trainer::LM: return std::make_unique<LmStepper>(data, cfg);
        case Trainer::SCG: return std::make_unique<ScgStepper>(data, cfg);
        default: return std::make_unique<CgStepper>(data, cfg, cfg.algorithm);
    }
}

}  // namespace

TrainOutcome train(const Network& net, const Dataset& train_set, const Dataset& val_set,
                   const Dataset& test_set, const TrainConfig& config) {
    config.validate();
    check_batch(net, train_set.x, train_set.y);
    check_batch(net, val_set.x, val_set.y);
    check_batch(net, test_set.x, test_set.y);

    TrainOutcome out;
    out.network = net;
    if (config.max_epochs == 0) {
        out.history.stop = StopReason::MaxEpochs;
        return out;
    }

    Network current = net;
    auto stepper = make_stepper(train_set, config);

    double best_val = batch_mse(current, val_set.x, val_set.y);
    if (!std::isfinite(best_val)) throw numerical_error("train: non-finite initial loss");
    Network best_net = current;
    int best_epoch = -1;
    int fails = 0;
    StopReason stop = StopReason::MaxEpochs;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto forced = stepper->step(current);
        if (forced) {
            stop = *forced;
            break;
        }
        const double tr = batch_mse(current, train_set.x, train_set.y);
        const double va = batch_mse(current, val_set.x, val_set.y);
        const double te = batch_mse(current, test_set.x, test_set.y);
        if (!std::isfinite(tr) || !std::isfinite(va)) {
            throw numerical_error("train: non-finite loss (divergence)");
        }
        out.history.train_mse.push_back(tr);
        out.history.val_mse.push_back(va);
        out.history.test_mse.push_back(te);

        if (va < best_val) {
            best_val = va;
            best_net = current;
            best_epoch = epoch;
            fails = 0;
        } else {
            ++fails;
        }

        if (tr <= config.goal_mse) {
            stop = StopReason::Goal;
            break;
        }
        if (fails >= config.validation_patience) {
            stop = StopReason::ValidationFailures;
            break;
        }
    }

    out.network = std::move(best_net);
    out.history.stop = stop;
    out.history.best_epoch = best_epoch;
    return out;
}

}  // namespace fxcast
