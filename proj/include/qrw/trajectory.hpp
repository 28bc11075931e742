#pragma once

#include <algorithm>
#include <vector>

#include "qrw/dynamics.hpp"
#include "qrw/integrators.hpp"

namespace qrw {

struct Trajectory {
    SystemParams params;
    ModelVariant model;
    double dt_out = 0.0;
    std::vector<DynState> samples;

    bool has_inversion() const { return model.kind == ModelKind::full; }

    double duration() const {
        return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
    }
};

/// Running monitors for quantities that the dynamics do not enforce.
struct SaturationMonitor {
    double max_bloch_violation = 0.0;
    double max_collective_saturation = 0.0;

    void observe(const DynState& s, const ModelVariant& model) {
        if (model.kind == ModelKind::full) {
            max_bloch_violation = std::max(max_bloch_violation, bloch_violation(s));
        }
        if (model.kind == ModelKind::collective) {
            max_collective_saturation =
                std::max(max_collective_saturation, collective_saturation(s, model.n_emitters));
        }
    }

    bool bloch_warning() const { return max_bloch_violation > bloch_warning_tolerance; }
};

/// Integrates the chosen model and records a trajectory with a parameter snapshot.
inline Trajectory simulate(const SystemParams& P, const ModelVariant& model, const DynState& s0,
                           const IntegrationPlan& plan, SaturationMonitor* monitor = nullptr) {
    P.validate();
    Trajectory traj{P, model, plan.dt * static_cast<double>(plan.sample_stride), {}};
    traj.samples.reserve(plan.sample_count());
    visit_model(P, model, [&](auto rhs) {
        integrate_each(rhs, s0, plan, [&](const DynState& s) {
            traj.samples.push_back(s);
            if (monitor != nullptr) monitor->observe(s, model);
        });
    });
    return traj;
}

}  // namespace qrw
