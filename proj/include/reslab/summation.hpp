#pragma once

#include <cmath>

namespace reslab {

/// Neumaier-compensated accumulator.  Results are deterministic for a fixed
/// order of add() calls, which every reduction in this library guarantees.
class Accumulator {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    // Folds another accumulator in; used when merging per-block partials.
    void add(const Accumulator& other) {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace reslab
