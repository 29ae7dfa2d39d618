// Shared fixtures: one solved chi per test binary.
#pragma once

#include <memory>

#include "tfatom/tf_core.hpp"

namespace fixture {

inline std::shared_ptr<const tfatom::UniversalChi> chi() {
    static auto c = std::make_shared<const tfatom::UniversalChi>(tfatom::solve_universal_chi());
    return c;
}

inline double d_cl() {
    static double d = tfatom::classical_constant(*chi()).d_cl;
    return d;
}

}  // namespace fixture
