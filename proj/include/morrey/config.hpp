#pragma once

namespace morrey {

// Global tolerances. exact_abs guards identities that hold exactly in
// real arithmetic (zero total mass, orthogonality, interval sums);
// general_rel covers everything dominated by search or iteration error.
struct Tolerances {
    double exact_abs = 1e-12;
    double general_rel = 1e-10;
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

}  // namespace morrey
