#pragma once

#include <cstddef>
#include <stdexcept>

namespace cavsim {

// Fixed-step integration window shared by the master-equation and SDE
// drivers. record_every thins the stored output; the step size is dt.
struct IntegratorConfig {
    double dt;
    double t_final;
    std::size_t record_every = 1;

    IntegratorConfig(double dt_, double t_final_, std::size_t record_every_ = 1)
        : dt(dt_), t_final(t_final_), record_every(record_every_) {
        if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
        if (!(t_final >= 0.0)) throw std::invalid_argument("IntegratorConfig: t_final must be >= 0");
        if (record_every == 0) throw std::invalid_argument("IntegratorConfig: record_every must be >= 1");
    }

    std::size_t n_steps() const {
        return static_cast<std::size_t>(t_final / dt + 0.5);
    }
};

}  // namespace cavsim
