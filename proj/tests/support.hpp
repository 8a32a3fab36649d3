#pragma once

#include <Eigen/Dense>

#include "gelkit/chemistry.hpp"

namespace testing {

inline gelkit::SystemSpec two_type(std::vector<gelkit::Species> species, double waa, double wab, double wbb)
{
    Eigen::MatrixXd w(2, 2);
    w << waa, wab, wab, wbb;
    return gelkit::make_spec({std::move(species)}, w);
}

/// Single species with f groups of one type, W = [1].
inline gelkit::SystemSpec homopolymer(int f)
{
    return gelkit::make_spec({{{{f}, 1.0}}}, Eigen::MatrixXd::Ones(1, 1));
}

} // namespace testing
