#include "flow714/ode/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
// 5th-order weights (b7 = 0; identical to the a7 row, enabling FSAL).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Embedded 4th-order weights.
constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0, e4 = 393.0 / 640.0,
                 e5 = -92097.0 / 339200.0, e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;

void check_finite_state(const std::vector<double>& v, const char* where) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericalError(std::string(where) + ": non-finite state");
    }
}

std::vector<double> eval(const OdeField& field, const std::vector<double>& z, double t,
                         int64_t& evals) {
    std::vector<double> v = field(z, t);
    if (v.size() != z.size()) throw DimensionError("ode: field output size mismatch");
    check_finite_state(v, "ode field");
    ++evals;
    return v;
}

std::vector<double> axpy(const std::vector<double>& z, double dt,
                         std::initializer_list<std::pair<double, const std::vector<double>*>>
                             terms) {
    std::vector<double> out = z;
    for (const auto& [coef, k] : terms) {
        const double c = coef * dt;
        for (size_t i = 0; i < out.size(); ++i) out[i] += c * (*k)[i];
    }
    return out;
}

std::vector<double> rk4_step(const std::vector<double>& z, double t, double dt,
                             const OdeField& field, int64_t& evals) {
    const auto k1 = eval(field, z, t, evals);
    const auto k2 = eval(field, axpy(z, dt, {{0.5, &k1}}), t + dt / 2.0, evals);
    const auto k3 = eval(field, axpy(z, dt, {{0.5, &k2}}), t + dt / 2.0, evals);
    const auto k4 = eval(field, axpy(z, dt, {{1.0, &k3}}), t + dt, evals);
    std::vector<double> out = z;
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

// One Dormand-Prince attempt: fills y5 and, if err_out != nullptr, the
// embedded error estimate. k1 is reused (FSAL); k7 is written for the caller.
void dopri_attempt(const std::vector<double>& z, double t, double dt, const OdeField& field,
                   const std::vector<double>& k1, std::vector<double>& y5,
                   std::vector<double>& k7, std::vector<double>* err_out, int64_t& evals) {
    const auto k2 = eval(field, axpy(z, dt, {{a21, &k1}}), t + c2 * dt, evals);
    const auto k3 = eval(field, axpy(z, dt, {{a31, &k1}, {a32, &k2}}), t + c3 * dt, evals);
    const auto k4 =
        eval(field, axpy(z, dt, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), t + c4 * dt, evals);
    const auto k5 = eval(field, axpy(z, dt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}),
                         t + c5 * dt, evals);
    const auto k6 = eval(
        field, axpy(z, dt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}),
        t + dt, evals);
    y5 = axpy(z, dt, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    k7 = eval(field, y5, t + dt, evals);
    if (err_out != nullptr) {
        const auto y4 = axpy(
            z, dt, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
        err_out->resize(y5.size());
        for (size_t i = 0; i < y5.size(); ++i) (*err_out)[i] = y5[i] - y4[i];
    }
}

}  // namespace

OdeMethod ode_method_from_string(const std::string& name) {
    if (name == "euler") return OdeMethod::euler;
    if (name == "rk4") return OdeMethod::rk4;
    if (name == "dopri45") return OdeMethod::dopri45;
    throw DataError("ode: unknown method '" + name + "'");
}

std::string to_string(OdeMethod m) {
    switch (m) {
        case OdeMethod::euler: return "euler";
        case OdeMethod::rk4: return "rk4";
        case OdeMethod::dopri45: return "dopri45";
    }
    return "?";
}

std::vector<double> euler_step(const std::vector<double>& z, double t, double dt,
                               const OdeField& field) {
    if (dt <= 0.0) throw DataError("euler_step: dt must be positive");
    if (t + dt > 1.0 + 1e-12) throw DataError("euler_step: step leaves [0, 1]");
    int64_t evals = 0;
    const auto v = eval(field, z, t, evals);
    std::vector<double> out = z;
    for (size_t i = 0; i < out.size(); ++i) out[i] += v[i] * dt;
    return out;
}

std::vector<double> fixed_step_solve(OdeMethod method, std::vector<double> z0,
                                     const OdeField& field, int64_t steps) {
    if (steps < 1) throw DataError("fixed_step_solve: steps must be >= 1");
    const double dt = 1.0 / static_cast<double>(steps);
    int64_t evals = 0;
    std::vector<double> z = std::move(z0);
    for (int64_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        switch (method) {
            case OdeMethod::euler: {
                const auto v = eval(field, z, t, evals);
                for (size_t i = 0; i < z.size(); ++i) z[i] += v[i] * dt;
                break;
            }
            case OdeMethod::rk4:
                z = rk4_step(z, t, dt, field, evals);
                break;
            case OdeMethod::dopri45: {
                const auto k1 = eval(field, z, t, evals);
                std::vector<double> y5, k7;
                dopri_attempt(z, t, dt, field, k1, y5, k7, nullptr, evals);
                z = std::move(y5);
                break;
            }
        }
    }
    return z;
}

SolveReport integrate(std::vector<double> z0, const OdeField& field, const SolveConfig& cfg) {
    check_finite_state(z0, "integrate: initial state");
    if (cfg.max_steps < 1) throw DataError("integrate: max_steps must be >= 1");
    SolveReport report;
    if (cfg.record_trajectory) report.trajectory.emplace_back(0.0, z0);

    if (cfg.method != OdeMethod::dopri45) {
        if (cfg.steps < 1) throw DataError("integrate: steps must be >= 1");
        const double dt = 1.0 / static_cast<double>(cfg.steps);
        std::vector<double> z = std::move(z0);
        for (int64_t s = 0; s < cfg.steps; ++s) {
            const double t = static_cast<double>(s) * dt;
            z = cfg.method == OdeMethod::euler
                    ? euler_step(z, t, dt, field)
                    : rk4_step(z, t, dt, field, report.evaluations);
            if (cfg.method == OdeMethod::euler) report.evaluations += 1;
            ++report.accepted;
            const double t_next = s + 1 == cfg.steps ? 1.0 : t + dt;
            if (cfg.record_trajectory) report.trajectory.emplace_back(t_next, z);
        }
        report.final_state = std::move(z);
        report.final_time = 1.0;
        return report;
    }

    if (cfg.rtol <= 0.0 || cfg.atol <= 0.0) {
        throw DataError("integrate: rtol and atol must be positive");
    }
    std::vector<double> z = std::move(z0);
    double t = 0.0;
    double dt = std::clamp(cfg.initial_dt, 1e-12, 1.0);
    std::vector<double> k1 = eval(field, z, t, report.evaluations);
    std::vector<double> y5, k7, err;

    while (t < 1.0) {
        const bool final_step = t + dt >= 1.0;
        if (final_step) dt = 1.0 - t;
        if (report.accepted + report.rejected >= cfg.max_steps) {
            throw NumericalError("integrate: max_steps (" + std::to_string(cfg.max_steps) +
                                 ") exceeded at t=" + std::to_string(t));
        }
        dopri_attempt(z, t, dt, field, k1, y5, k7, &err, report.evaluations);

        // RMS of err_i / (atol + rtol * max(|z_i|, |z'_i|)).
        double acc = 0.0;
        for (size_t i = 0; i < z.size(); ++i) {
            const double scale = cfg.atol + cfg.rtol * std::max(std::fabs(z[i]),
                                                                std::fabs(y5[i]));
            const double r = err[i] / scale;
            acc += r * r;
        }
        const double err_norm = std::sqrt(acc / static_cast<double>(z.size()));

        if (err_norm <= 1.0) {
            t = final_step ? 1.0 : t + dt;
            z = y5;
            k1 = k7;  // FSAL
            ++report.accepted;
            if (cfg.record_trajectory) report.trajectory.emplace_back(t, z);
        } else {
            ++report.rejected;
        }

        const double factor =
            err_norm == 0.0 ? 5.0
                            : std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
        dt *= factor;
        if (dt < 1e-14 && t < 1.0) {
            throw NumericalError("integrate: step size underflow at t=" + std::to_string(t));
        }
    }
    report.final_state = std::move(z);
    report.final_time = 1.0;
    return report;
}

double convergence_order(const OdeField& field, const std::vector<double>& z0,
                         const std::vector<double>& exact_at_1, OdeMethod method,
                         std::span<const int64_t> step_ladder) {
    if (step_ladder.size() < 2) throw DataError("convergence_order: need >= 2 ladder points");
    std::vector<double> log_dt, log_err;
    for (int64_t steps : step_ladder) {
        const auto z = fixed_step_solve(method, z0, field, steps);
        double err = 0.0;
        for (size_t i = 0; i < z.size(); ++i) err += (z[i] - exact_at_1[i]) * (z[i] - exact_at_1[i]);
        err = std::sqrt(err);
        log_dt.push_back(std::log(1.0 / static_cast<double>(steps)));
        log_err.push_back(std::log(std::max(err, 1e-300)));
    }
    // Least-squares slope.
    const double n = static_cast<double>(log_dt.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < log_dt.size(); ++i) {
        sx += log_dt[i];
        sy += log_err[i];
        sxx += log_dt[i] * log_dt[i];
        sxy += log_dt[i] * log_err[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void dump_trajectory(const SolveReport& report, int64_t channels, int64_t dim,
                     int64_t frame_rate, const std::string& dir, const std::string& base_name) {
    std::filesystem::create_directories(dir);
    std::ofstream index(std::filesystem::path(dir) / (base_name + "_index.txt"));
    if (!index) throw DataError("dump_trajectory: cannot open index file");
    index.precision(17);
    for (size_t i = 0; i < report.trajectory.size(); ++i) {
        const auto& [t, state] = report.trajectory[i];
        LatentTensor z = LatentTensor::zeros(channels, dim,
                                             static_cast<int64_t>(state.size()) /
                                                 (channels * dim),
                                             frame_rate);
        z.data = state;
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%04zu.iflt", base_name.c_str(), i);
        write_latent(z, (std::filesystem::path(dir) / name).string());
        index << t << '\t' << name << '\n';
    }
}

}  // namespace flow714
