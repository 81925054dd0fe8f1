#pragma once

// Multi-class RBF support vector classifier: one-vs-one binary machines
// trained with an SMO dual solver (maximal-violating-pair working set),
// combined by majority vote.

#include "loco/features.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace loco::svm {

struct LabeledSample {
    std::vector<double> features;
    int label = 0;
};

LabeledSample make_sample(const FeatureVector& features, int label);

struct TrainParams {
    double gamma = 100.0;    ///< RBF width in 1/m^2, K(a, b) = exp(-gamma |a - b|^2)
    double c = 10.0;         ///< box constraint on the dual coefficients
    double tolerance = 1e-3; ///< stop when the maximal KKT violation falls below this
    std::size_t max_iterations = 10'000'000;
};

/// decision(x) = sum_k coef[k] * K(support[k], x) - rho.
/// Positive decisions vote for `positive`, otherwise for `negative`.
struct BinaryMachine {
    int positive = 0;
    int negative = 0;
    double rho = 0.0;
    std::vector<double> coef;  ///< alpha_k * y_k, so |coef| <= c
    std::vector<std::vector<double>> support;

    // Training diagnostics, not persisted.
    double kkt_gap = 0.0;      ///< max violation at termination
    std::size_t iterations = 0;
    std::vector<std::size_t> support_indices;  ///< into the training set
};

struct ClassifierModel {
    std::size_t dimension = 0;
    double gamma = 0.0;
    double c = 0.0;
    std::vector<int> classes;  ///< ascending
    std::vector<BinaryMachine> machines;  ///< pairs (classes[a], classes[b]), a < b, row-major

    bool trained() const { return !machines.empty(); }
};

/// Throws std::invalid_argument on fewer than two classes, ragged or
/// non-finite features, or non-positive gamma / c.
ClassifierModel train(std::span<const LabeledSample> samples, const TrainParams& params);

double kernel(const ClassifierModel& model, std::span<const double> a, std::span<const double> b);
double decision_value(const ClassifierModel& model, const BinaryMachine& machine, std::span<const double> x);

/// Votes per class, aligned with model.classes.
std::vector<int> votes(const ClassifierModel& model, std::span<const double> x);

/// Majority vote; ties go to the lowest class id. Throws std::logic_error
/// on an untrained model and std::invalid_argument on a dimension mismatch.
int predict(const ClassifierModel& model, std::span<const double> x);
int predict(const ClassifierModel& model, const FeatureVector& x);

/// Versioned text format; values written with 17 significant digits.
void save_model(std::ostream& out, const ClassifierModel& model);
/// Throws ParseError for empty, truncated, or wrong-version input.
ClassifierModel load_model(std::istream& in);

void save_model_file(const std::string& path, const ClassifierModel& model);
ClassifierModel load_model_file(const std::string& path);

} // namespace loco::svm
