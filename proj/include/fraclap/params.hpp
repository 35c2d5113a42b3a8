#pragma once

#include <string>

#include "fraclap/error.hpp"

namespace fraclap {

// Discretization controls for singular integrals.
struct QuadratureParams {
    double split_radius = 0.1;  // near/far split around the singular point
    int panels_near = 32;       // graded panels toward singular points
    int panels_far = 32;        // geometric panels on long or semi-infinite ranges
    double far_cutoff = 800.0;  // analytic tail formulas beyond this radius
    double tol = 1e-8;

    void validate() const {
        if (!(split_radius > 0.0)) throw ConfigError("split_radius must be positive");
        if (panels_near < 8) throw ConfigError("panels_near must be >= 8");
        if (panels_far < 8) throw ConfigError("panels_far must be >= 8");
        if (!(far_cutoff > split_radius)) throw ConfigError("far_cutoff must exceed split_radius");
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    }

    // Defaults tied to a grid: split 2h, cutoff 10L.
    static QuadratureParams for_grid(double h, double L) {
        QuadratureParams qp;
        qp.split_radius = 2.0 * h;
        qp.far_cutoff = 10.0 * L;
        return qp;
    }
};

}  // namespace fraclap
