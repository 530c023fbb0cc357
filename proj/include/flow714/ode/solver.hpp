#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flow714/codec/latent.hpp"

namespace flow714 {

// Right-hand side of dz/dt = v(z, t) on a flat state vector.
using OdeField = std::function<std::vector<double>(const std::vector<double>&, double)>;

enum class OdeMethod { euler, rk4, dopri45 };

OdeMethod ode_method_from_string(const std::string& name);
std::string to_string(OdeMethod m);

struct SolveConfig {
    OdeMethod method = OdeMethod::dopri45;
    int64_t steps = 50;        // fixed-step methods (euler, rk4)
    double rtol = 1e-5;        // adaptive dopri45
    double atol = 1e-5;
    double initial_dt = 0.05;
    int64_t max_steps = 10000;  // attempt budget (accepted + rejected)
    bool record_trajectory = false;
};

struct SolveReport {
    std::vector<double> final_state;
    double final_time = 0.0;
    int64_t accepted = 0;
    int64_t rejected = 0;
    int64_t evaluations = 0;
    std::vector<std::pair<double, std::vector<double>>> trajectory;
};

// One explicit Euler step z + v(z, t) * dt. Requires dt > 0, t + dt <= 1.
std::vector<double> euler_step(const std::vector<double>& z, double t, double dt,
                               const OdeField& field);

// Integrates from t = 0 to exactly t = 1. Dormand-Prince uses the embedded
// 4(5) error estimate with per-element tolerance atol + rtol * max(|z|,|z'|),
// RMS error norm, acceptance at norm <= 1, the standard controller
// dt <- dt * min(5, max(0.2, 0.9 * err^(-1/5))), FSAL reuse, and a final
// step clamped to land on t = 1.
SolveReport integrate(std::vector<double> z0, const OdeField& field, const SolveConfig& cfg);

// Fixed-step integration from 0 to 1 (dopri45 runs its 5th-order solution
// without error control). Used by the convergence ladder.
std::vector<double> fixed_step_solve(OdeMethod method, std::vector<double> z0,
                                     const OdeField& field, int64_t steps);

// Least-squares slope of log(error) vs log(dt) on a ladder of step counts,
// against a known solution at t = 1.
double convergence_order(const OdeField& field, const std::vector<double>& z0,
                         const std::vector<double>& exact_at_1, OdeMethod method,
                         std::span<const int64_t> step_ladder);

// Trajectory dump: one latent-cache file per recorded sample plus an index
// text file of t values.
void dump_trajectory(const SolveReport& report, int64_t channels, int64_t dim,
                     int64_t frame_rate, const std::string& dir, const std::string& base_name);

}  // namespace flow714
