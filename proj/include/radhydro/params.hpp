#pragma once

#include <stdexcept>

namespace radhydro {

/// Physical constants of the diffusion-approximation model.
///
/// All downstream symbol and energy formulas are derived in the normalized
/// regime (every constant equal to 1). Non-normalized values can be stored,
/// but constructing them requires an explicit opt-in from the caller.
struct ModelParameters {
    double mu = 1.0;           // shear viscosity
    double lambda_visc = 1.0;  // second viscosity
    double kappa = 1.0;        // heat conductivity
    double gas_const = 1.0;    // R in P = R rho Theta
    double c_v = 1.0;          // specific heat
    double light_speed = 1.0;

    bool is_normalized() const {
        return mu == 1.0 && lambda_visc == 1.0 && kappa == 1.0 &&
               gas_const == 1.0 && c_v == 1.0 && light_speed == 1.0;
    }

    void validate(bool allow_non_normalized = false) const {
        if (!(mu > 0.0))
            throw std::invalid_argument("ModelParameters: mu must be positive");
        if (!(3.0 * lambda_visc + 2.0 * mu > 0.0))
            throw std::invalid_argument("ModelParameters: 3*lambda + 2*mu must be positive");
        if (!(light_speed > 0.0))
            throw std::invalid_argument("ModelParameters: light_speed must be positive");
        if (!is_normalized() && !allow_non_normalized)
            throw std::invalid_argument(
                "ModelParameters: non-normalized regime requires explicit opt-in");
    }

    static ModelParameters normalized() { return ModelParameters{}; }
};

}  // namespace radhydro
