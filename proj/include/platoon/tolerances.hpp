#pragma once

// Numerical tolerances shared across the library. Collected here so that a
// single edit retunes every check that depends on them.

namespace platoon::tol {

// Relative asymmetry accepted by sym_eigen before it rejects the input.
inline constexpr double kSymmetry = 1e-12;

// Off-diagonal Frobenius norm (relative to ||A||_F) at which cyclic Jacobi stops.
inline constexpr double kJacobiOffDiag = 1e-12;

// Hard cap on Jacobi sweeps; 4x4 inputs converge in well under 10.
inline constexpr int kJacobiMaxSweeps = 64;

// Smallest singular value below which a transform is treated as singular.
inline constexpr double kSingular = 1e-12;

// State magnitude at which a simulation is declared diverged.
inline constexpr double kDivergence = 1e12;

}  // namespace platoon::tol
