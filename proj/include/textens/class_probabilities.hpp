#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace textens {

// Per-class probability vector, the common output currency of every
// classifier. Values are non-negative and sum to 1 (up to rounding).
class ClassProbabilities {
public:
    ClassProbabilities() = default;
    explicit ClassProbabilities(std::vector<double> values)
        : values_(std::move(values)) {}

    static ClassProbabilities uniform(std::size_t n) {
        return ClassProbabilities(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static ClassProbabilities one_hot(std::size_t n, std::size_t hot) {
        std::vector<double> v(n, 0.0);
        v[hot] = 1.0;
        return ClassProbabilities(std::move(v));
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    // lowest index wins ties
    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (values_[i] > values_[best]) best = i;
        return best;
    }

    bool is_distribution(double tol = 1e-9) const {
        double sum = 0.0;
        for (double v : values_) {
            if (v < 0.0 || std::isnan(v)) return false;
            sum += v;
        }
        return std::abs(sum - 1.0) <= tol;
    }

private:
    std::vector<double> values_;
};

}  // namespace textens
