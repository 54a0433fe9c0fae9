#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace succession {

struct QuadratureResult {
    double value = 0.0;
    double error_bound = 0.0;  // conservative sum of per-panel estimates
    std::size_t panels = 0;    // accepted panel count
};

/// Adaptive composite Gauss-Legendre integration of f over [0,1].
///
/// `breakpoints` seeds the initial panel decomposition (interior kinks of a
/// piecewise integrand); values outside (0,1) are ignored. Each panel is
/// bisected until the local estimate |GL(panel) - GL(left) - GL(right)| is
/// at most tol * width, so the accumulated bound stays below tol. The
/// decomposition and summation order are fixed by the input, making results
/// deterministic. Throws ToleranceNotMetError once `max_panels` panels have
/// been examined without convergence.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    double tol,
                                    std::size_t max_panels);

}  // namespace succession
