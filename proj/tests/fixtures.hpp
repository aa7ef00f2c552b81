#pragma once

#include "morrey/measure.hpp"

namespace morrey::testing {

// delta_1 - delta_0
inline SignedMeasure two_dirac_1d() {
    return validate_measure({{Vec{0.0}, -1.0}, {Vec{1.0}, 1.0}});
}

// 2 delta_1 - delta_0 - delta_{-1}
inline SignedMeasure three_atom_1d() {
    return validate_measure({{Vec{-1.0}, -1.0}, {Vec{0.0}, -1.0}, {Vec{1.0}, 2.0}});
}

// delta_{(1,0)} - delta_{(-1,0)}
inline SignedMeasure dipole_2d() {
    return validate_measure({{Vec{1.0, 0.0}, 1.0}, {Vec{-1.0, 0.0}, -1.0}});
}

}  // namespace morrey::testing
