#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fbent {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point (or box) fell outside the domain it was declared on.
struct domain_error : error {
    using error::error;
};

/// A piecewise map was evaluated where no branch is declared.
struct model_violation : error {
    using error::error;
};

/// A requested certificate cannot be produced (not a cover, stale witness, ...).
struct infeasible_error : error {
    using error::error;
};

/// Search space exceeds the configured budget.
struct budget_error : error {
    using error::error;
};

/// Grid too coarse for the requested construction.
struct resolution_error : error {
    using error::error;
};

inline Vec make_vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

} // namespace fbent
