#include "loco/svm.hpp"

#include "loco/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loco::svm {
namespace {

constexpr char kMagic[] = "loco-svm-model";
constexpr int kFormatVersion = 1;
constexpr double kTau = 1e-12;

double rbf(double gamma, std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

struct BinarySolution {
    std::vector<double> alpha;
    double rho = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
};

// Solves  min 1/2 a'Qa - e'a  s.t. y'a = 0, 0 <= a <= c  with Q_ij = y_i y_j K_ij.
BinarySolution solve_binary(const std::vector<double>& kmat, const std::vector<double>& y, double c,
                            const TrainParams& params) {
    const std::size_t n = y.size();
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kmat[i * n + j]; };

    BinarySolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto& alpha = sol.alpha;

    auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c; };

    while (true) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        sol.gap = (i == n || j == n) ? 0.0 : gmax - gmin;
        if (i == n || j == n || sol.gap < params.tolerance) break;
        if (sol.iterations >= params.max_iterations) break;
        ++sol.iterations;

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * dai + q(t, j) * daj;
    }

    // Bias: mean of y*grad over free coefficients, else the midpoint of the
    // feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    sol.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return sol;
}

void check_params(const TrainParams& p) {
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw std::invalid_argument("rbf gamma must be positive");
    if (!(p.c > 0.0) || !std::isfinite(p.c)) throw std::invalid_argument("regularization C must be positive");
    if (!(p.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

} // namespace

LabeledSample make_sample(const FeatureVector& features, int label) {
    return {std::vector<double>(features.begin(), features.end()), label};
}

ClassifierModel train(std::span<const LabeledSample> samples, const TrainParams& params) {
    check_params(params);
    if (samples.empty()) throw std::invalid_argument("no training samples");
    const std::size_t dim = samples.front().features.size();
    if (dim == 0) throw std::invalid_argument("samples have no features");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& f = samples[s].features;
        if (f.size() != dim) throw std::invalid_argument(fmt::format("sample {} has {} features, expected {}", s, f.size(), dim));
        for (double v : f)
            if (!std::isfinite(v)) throw std::invalid_argument(fmt::format("sample {} has a non-finite feature", s));
        by_class[samples[s].label].push_back(s);
    }
    if (by_class.size() < 2) throw std::invalid_argument("training needs at least two classes");

    ClassifierModel model;
    model.dimension = dim;
    model.gamma = params.gamma;
    model.c = params.c;
    for (const auto& [label, idx] : by_class) model.classes.push_back(label);

    const std::size_t k = model.classes.size();
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const int pos = model.classes[a];
            const int neg = model.classes[b];

            // Keep the original sample order so training is independent of
            // which class is labelled positive.
            std::vector<std::size_t> idx;
            for (std::size_t s = 0; s < samples.size(); ++s)
                if (samples[s].label == pos || samples[s].label == neg) idx.push_back(s);

            const std::size_t n = idx.size();
            std::vector<double> y(n);
            std::vector<double> kmat(n * n);
            for (std::size_t r = 0; r < n; ++r) {
                y[r] = samples[idx[r]].label == pos ? 1.0 : -1.0;
                for (std::size_t col = r; col < n; ++col) {
                    const double v = rbf(params.gamma, samples[idx[r]].features, samples[idx[col]].features);
                    kmat[r * n + col] = v;
                    kmat[col * n + r] = v;
                }
            }

            const BinarySolution sol = solve_binary(kmat, y, params.c, params);
            BinaryMachine m;
            m.positive = pos;
            m.negative = neg;
            m.rho = sol.rho;
            m.kkt_gap = sol.gap;
            m.iterations = sol.iterations;
            for (std::size_t r = 0; r < n; ++r) {
                if (sol.alpha[r] <= 0.0) continue;
                m.coef.push_back(sol.alpha[r] * y[r]);
                m.support.push_back(samples[idx[r]].features);
                m.support_indices.push_back(idx[r]);
            }
            model.machines.push_back(std::move(m));
        }
    }
    return model;
}

double kernel(const ClassifierModel& model, std::span<const double> a, std::span<const double> b) {
    return rbf(model.gamma, a, b);
}

double decision_value(const ClassifierModel& model, const BinaryMachine& m, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m.coef.size(); ++k) sum += m.coef[k] * rbf(model.gamma, m.support[k], x);
    return sum - m.rho;
}

std::vector<int> votes(const ClassifierModel& model, std::span<const double> x) {
    if (!model.trained()) throw std::logic_error("classifier model is not trained");
    if (x.size() != model.dimension)
        throw std::invalid_argument(fmt::format("expected {} features, got {}", model.dimension, x.size()));
    std::vector<int> count(model.classes.size(), 0);
    auto slot = [&](int label) {
        return static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), label) -
                                        model.classes.begin());
    };
    for (const auto& m : model.machines) ++count[slot(decision_value(model, m, x) > 0.0 ? m.positive : m.negative)];
    return count;
}

int predict(const ClassifierModel& model, std::span<const double> x) {
    const auto count = votes(model, x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < count.size(); ++i)
        if (count[i] > count[best]) best = i;
    return model.classes[best];
}

int predict(const ClassifierModel& model, const FeatureVector& x) {
    return predict(model, std::span<const double>(x.data(), x.size()));
}

void save_model(std::ostream& out, const ClassifierModel& model) {
    if (!model.trained()) throw std::logic_error("refusing to save an untrained model");
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << fmt::format("dimension {}\n", model.dimension);
    out << fmt::format("kernel rbf gamma {:.17g}\n", model.gamma);
    out << fmt::format("c {:.17g}\n", model.c);
    out << "classes " << model.classes.size();
    for (int c : model.classes) out << ' ' << c;
    out << '\n';
    out << fmt::format("machines {}\n", model.machines.size());
    for (const auto& m : model.machines) {
        out << fmt::format("machine {} {} rho {:.17g} support {}\n", m.positive, m.negative, m.rho, m.coef.size());
        for (std::size_t k = 0; k < m.coef.size(); ++k) {
            std::string row = fmt::format("{:.17g}", m.coef[k]);
            for (double v : m.support[k]) row += fmt::format(" {:.17g}", v);
            out << row << '\n';
        }
    }
    out << "end\n";
}

namespace {

// Line-oriented reader that reports where a model file went wrong.
class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::istringstream next(const char* expecting) {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_;
            if (text.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(text);
        }
        if (line_ == 0) throw ParseError(0, "empty model file");
        throw ParseError(line_, fmt::format("truncated model file, expected {}", expecting));
    }

    template <class T>
    T read(std::istringstream& s, const char* what) {
        T v{};
        if (!(s >> v)) throw ParseError(line_, fmt::format("expected {}", what));
        return v;
    }

    void keyword(std::istringstream& s, const std::string& word) {
        std::string got;
        if (!(s >> got) || got != word) throw ParseError(line_, fmt::format("expected '{}'", word));
    }

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

} // namespace

ClassifierModel load_model(std::istream& in) {
    ModelReader r(in);
    ClassifierModel model;

    auto header = r.next("header");
    std::string magic;
    header >> magic;
    if (magic != kMagic) throw ParseError(r.line(), "not a classifier model file");
    const int version = r.read<int>(header, "format version");
    if (version != kFormatVersion)
        throw ParseError(r.line(), fmt::format("unsupported model format version {} (expected {})", version, kFormatVersion));

    auto dim = r.next("dimension");
    r.keyword(dim, "dimension");
    model.dimension = r.read<std::size_t>(dim, "dimension");

    auto kern = r.next("kernel");
    r.keyword(kern, "kernel");
    r.keyword(kern, "rbf");
    r.keyword(kern, "gamma");
    model.gamma = r.read<double>(kern, "gamma");

    auto creg = r.next("c");
    r.keyword(creg, "c");
    model.c = r.read<double>(creg, "c");

    auto cls = r.next("classes");
    r.keyword(cls, "classes");
    const auto n_classes = r.read<std::size_t>(cls, "class count");
    for (std::size_t i = 0; i < n_classes; ++i) model.classes.push_back(r.read<int>(cls, "class id"));
    if (n_classes < 2 || !std::is_sorted(model.classes.begin(), model.classes.end()))
        throw ParseError(r.line(), "class list must hold at least two ascending ids");

    auto mach = r.next("machines");
    r.keyword(mach, "machines");
    const auto n_machines = r.read<std::size_t>(mach, "machine count");
    if (n_machines != n_classes * (n_classes - 1) / 2) throw ParseError(r.line(), "machine count does not match class count");

    for (std::size_t mi = 0; mi < n_machines; ++mi) {
        auto head = r.next("machine block");
        BinaryMachine m;
        r.keyword(head, "machine");
        m.positive = r.read<int>(head, "positive class");
        m.negative = r.read<int>(head, "negative class");
        r.keyword(head, "rho");
        m.rho = r.read<double>(head, "rho");
        r.keyword(head, "support");
        const auto n_sv = r.read<std::size_t>(head, "support vector count");
        for (std::size_t k = 0; k < n_sv; ++k) {
            auto row = r.next("support vector row");
            m.coef.push_back(r.read<double>(row, "coefficient"));
            std::vector<double> sv(model.dimension);
            for (auto& v : sv) v = r.read<double>(row, "support vector component");
            m.support.push_back(std::move(sv));
        }
        model.machines.push_back(std::move(m));
    }
    auto tail = r.next("end marker");
    r.keyword(tail, "end");
    return model;
}

void save_model_file(const std::string& path, const ClassifierModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path);
    save_model(out, model);
    if (!out) throw std::runtime_error("failed writing model file " + path);
}

ClassifierModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path);
    return load_model(in);
}

} // namespace loco::svm
