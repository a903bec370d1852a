#pragma once

#include <memory>

#include "density.hpp"
#include "field.hpp"
#include "nonlinearity.hpp"

namespace pks {

using ModelPtr = std::shared_ptr<const Nonlinearity>;

inline ModelPtr make_model(const PressureLaw& law) { return std::make_shared<const Nonlinearity>(law); }

// One instant of the evolution. density is always solve_density(phi).
struct SimState {
    double t = 0.0;
    ScalarField phi;
    DensitySolution density;
    double epsilon = 0.0;
    ModelPtr model;

    const PressureLaw& law() const { return model->law(); }

    static SimState initial(ScalarField phi, double epsilon, ModelPtr model, double t = 0.0) {
        if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
        if (!model) throw ConfigError("missing nonlinearity");
        SimState s;
        s.t = t;
        s.phi = std::move(phi);
        s.epsilon = epsilon;
        s.model = std::move(model);
        s.density = solve_density(s.phi, s.model->law(), 1.0);
        return s;
    }
};

} // namespace pks
