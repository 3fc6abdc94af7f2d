#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace fxcast {

// ===========================================================================
// Network definition
// ===========================================================================

enum class Activation { Tansig, Purelin };

struct NetworkSpec {
    int input_count = 1;
    std::vector<int> hidden_layer_sizes = {10};
    int output_count = 1;
    Activation hidden_activation = Activation::Tansig;
    Activation output_activation = Activation::Purelin;

    void validate() const;
    nlohmann::json to_json() const;
    static NetworkSpec from_json(const nlohmann::json& j);
};

/// Layered feed-forward network. weights[l] maps layer l inputs to its
/// outputs (rows = units, cols = inputs); biases[l] matches the rows.
struct Network {
    NetworkSpec spec;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::uint64_t rng_seed = 0;

    int parameter_count() const;
    nlohmann::json to_json() const;
    static Network from_json(const nlohmann::json& j);
};

/// Weights uniform on [-0.5, 0.5] / sqrt(fan-in), deterministic per seed.
Network init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Single-sample forward pass.
Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input);

/// Row-wise forward over a batch (rows = samples).
Eigen::MatrixXd predict(const Network& net, const Eigen::MatrixXd& inputs);

/// Mean squared error over all outputs of all samples.
double batch_mse(const Network& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets);

/// Exact analytic gradient of batch_mse with respect to the flat parameter
/// vector (layer by layer: weight matrix in column-major storage order, then
/// bias).
Eigen::VectorXd gradient(const Network& net, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets);

/// Per-sample error Jacobian: row k holds d e_k / d params where e stacks
/// (output - target) sample-major. J^T e equals (rows/2) * gradient.
Eigen::MatrixXd jacobian(const Network& net, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, Eigen::VectorXd* errors = nullptr);

/// Flat parameter round-trip used by the trainers.
Eigen::VectorXd pack_parameters(const Network& net);
void unpack_parameters(Network& net, const Eigen::VectorXd& params);

// ===========================================================================
// Training
// ===========================================================================

enum class Trainer { LM, SCG, CG_PowellBeale, CG_FletcherReeves, CG_PolakRibiere };

std::string to_string(Trainer t);
Trainer trainer_from_string(const std::string& s);

struct TrainConfig {
    Trainer algorithm = Trainer::LM;
    int max_epochs = 200;
    double goal_mse = 0.0;
    int validation_patience = 6;
    double gradient_floor = 1e-10;

    // Levenberg-Marquardt damping schedule
    double mu0 = 1e-3;
    double mu_increase = 10.0;
    double mu_decrease = 0.1;
    double mu_max = 1e10;

    // Conjugate-gradient backtracking line search
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_halvings = 30;

    // Scaled conjugate gradient
    double scg_sigma = 5e-5;
    double scg_lambda0 = 5e-7;

    void validate() const;
};

enum class StopReason { Goal, MaxEpochs, ValidationFailures, GradientFloor, MuOverflow };

std::string to_string(StopReason r);

struct TrainHistory {
    std::vector<double> train_mse;
    std::vector<double> val_mse;
    std::vector<double> test_mse;
    StopReason stop = StopReason::MaxEpochs;
    int best_epoch = -1;  // epoch index of the returned network

    std::size_t epochs() const { return train_mse.size(); }
    std::string to_csv() const;  // epoch,train_mse,val_mse,test_mse
};

struct Dataset {
    Eigen::MatrixXd x;  // rows = samples
    Eigen::MatrixXd y;
};

struct TrainOutcome {
    Network network;  // the weights at the best-validation epoch
    TrainHistory history;
};

/// Trains a copy of `net` on the training partition with early stopping on
/// the validation partition; the test partition is only tracked. Throws
/// numerical_error when the loss turns non-finite.
TrainOutcome train(const Network& net, const Dataset& train_set, const Dataset& val_set,
                   const Dataset& test_set, const TrainConfig& config);

}  // namespace fxcast
