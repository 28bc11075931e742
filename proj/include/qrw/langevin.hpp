#pragma once

// Damped particle dv/dt = -lambda v + xi(t) driven by stationary Gaussian
// noise with a prescribed force correlation <xi(t') xi(t'')> = 2 d K(t' - t'').
// Coloured noise is synthesised by circulant embedding of the covariance,
// and the position variance is compared with the double-integral expression
// and with the closed form for delta-correlated forcing.

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qrw/error.hpp"
#include "qrw/parallel.hpp"
#include "qrw/walk.hpp"

namespace qrw {

enum class KernelKind { delta, gaussian_cosine, exponential_cosine };

inline std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::delta: return "delta";
        case KernelKind::gaussian_cosine: return "gaussian-cosine";
        case KernelKind::exponential_cosine: return "exponential-cosine";
    }
    return "delta";
}

struct NoiseKernel {
    KernelKind kind = KernelKind::delta;
    double d = 0.125;
    double sigma = 0.5;
    double Omega = 0.0;

    /// K(tau) without the 2d prefactor; undefined (zero) for the delta kind.
    double shape(double tau) const {
        switch (kind) {
            case KernelKind::gaussian_cosine:
                return std::exp(-tau * tau / (2.0 * sigma * sigma)) * std::cos(Omega * tau);
            case KernelKind::exponential_cosine:
                return std::exp(-std::abs(tau) / sigma) * std::cos(Omega * tau);
            case KernelKind::delta:
            default:
                return 0.0;
        }
    }

    double covariance(double tau) const { return 2.0 * d * shape(tau); }

    /// Integral of the correlation over all lags; sets the long-time slope
    /// of the position variance, slope = spectral_weight / lambda^2.
    double spectral_weight() const {
        switch (kind) {
            case KernelKind::gaussian_cosine:
                return 2.0 * d * sigma * std::sqrt(2.0 * std::numbers::pi) *
                       std::exp(-0.5 * sigma * sigma * Omega * Omega);
            case KernelKind::exponential_cosine:
                return 2.0 * d * 2.0 * sigma / (1.0 + sigma * sigma * Omega * Omega);
            case KernelKind::delta:
            default:
                return 2.0 * d;
        }
    }

    void validate() const {
        if (!(d > 0.0)) throw ValidationError("noise kernel: d must be > 0");
        if (kind != KernelKind::delta && !(sigma > 0.0)) {
            throw ValidationError("noise kernel: sigma must be > 0");
        }
        if (!(Omega >= 0.0)) throw ValidationError("noise kernel: Omega must be >= 0");
    }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

inline FftwPlan make_forward_plan(std::size_t n) {
    std::vector<std::complex<double>> buf(n);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    return FftwPlan(fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED));
}

inline void execute(const FftwPlan& plan, std::vector<std::complex<double>>& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan.get(), p, p);
}

}  // namespace detail

/// Stationary Gaussian series with covariance 2 d K(k dt) between samples k
/// apart. Thread-safe to draw from once constructed.
class NoiseSynthesizer {
public:
    static constexpr double negative_density_tolerance = 1e-8;

    NoiseSynthesizer(const NoiseKernel& kernel, double dt, std::size_t n_samples)
        : kernel_(kernel), dt_(dt), n_(n_samples) {
        kernel.validate();
        if (!(dt > 0.0)) throw ValidationError("noise synthesis: dt must be > 0");
        if (n_samples < 1) throw ValidationError("noise synthesis: need at least one sample");
        if (kernel.kind == KernelKind::delta) return;

        // Embedding must cover the series and the kernel's decay.
        std::size_t m = 2;
        while (m < 2 * n_samples) m *= 2;
        while (0.5 * static_cast<double>(m) * dt < 40.0 * kernel.sigma) m *= 2;
        m_ = m;

        std::vector<std::complex<double>> row(m_);
        for (std::size_t k = 0; k <= m_ / 2; ++k) {
            const double c = kernel.covariance(static_cast<double>(k) * dt);
            row[k] = c;
            if (k > 0 && k < m_ / 2) row[m_ - k] = c;
        }
        plan_ = detail::make_forward_plan(m_);
        detail::execute(plan_, row);

        double max_ev = 0.0;
        double min_ev = 0.0;
        for (const auto& v : row) {
            max_ev = std::max(max_ev, v.real());
            min_ev = std::min(min_ev, v.real());
        }
        if (min_ev < -negative_density_tolerance * max_ev) {
            throw ValidationError("invalid kernel: negative spectral density " + std::to_string(min_ev) +
                                  " (max " + std::to_string(max_ev) + ")");
        }
        root_.resize(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            root_[k] = std::sqrt(std::max(row[k].real(), 0.0) / static_cast<double>(m_));
        }
    }

    template <class Rng>
    std::vector<double> draw(Rng& rng) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> out(n_);
        if (kernel_.kind == KernelKind::delta) {
            const double sd = std::sqrt(2.0 * kernel_.d / dt_);
            for (auto& x : out) x = sd * normal(rng);
            return out;
        }
        std::vector<std::complex<double>> w(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            w[k] = root_[k] * std::complex<double>(re, im);
        }
        detail::execute(plan_, w);
        for (std::size_t i = 0; i < n_; ++i) out[i] = w[i].real();
        return out;
    }

    std::size_t embedding_size() const { return m_; }

private:
    NoiseKernel kernel_;
    double dt_;
    std::size_t n_;
    std::size_t m_ = 0;
    detail::FftwPlan plan_;
    std::vector<double> root_;
};

template <class Rng>
std::vector<double> synthesize_noise(const NoiseKernel& kernel, double dt, std::size_t n_samples, Rng& rng) {
    return NoiseSynthesizer(kernel, dt, n_samples).draw(rng);
}

struct LangevinParams {
    double lambda_damp = 1.0;
    NoiseKernel kernel;
    double dt = 0.05;
    double t_end = 40.0;
    std::size_t n_realizations = 4000;
    std::uint64_t master_seed = 1;
    std::size_t n_output = 200;  // sampled times along the curve
    unsigned workers = 0;

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

    void validate() const {
        kernel.validate();
        if (!(lambda_damp > 0.0)) throw ValidationError("langevin: lambda_damp must be > 0");
        if (!(dt > 0.0) || !(t_end > dt)) throw ValidationError("langevin: need 0 < dt < t_end");
        if (kernel.kind != KernelKind::delta && dt > kernel.sigma / 10.0 * (1.0 + 1e-12)) {
            throw ValidationError("langevin: dt must be <= sigma/10 for coloured kernels");
        }
        if (n_realizations < 2) throw ValidationError("langevin: need at least two realizations");
        if (n_output < 1 || n_output > steps()) throw ValidationError("langevin: bad n_output");
    }
};

/// <(x(t) - x(0))^2> for delta-correlated forcing with v(0) = 0.
inline double variance_analytic(double lambda, double d, double t) {
    if (!(lambda > 0.0)) throw ValidationError("variance_analytic: lambda must be > 0");
    const double l = lambda;
    return 2.0 * d / (l * l) *
           (t - 2.0 / l * (-std::expm1(-l * t)) + 1.0 / (2.0 * l) * (-std::expm1(-2.0 * l * t)));
}

struct VarianceCurve {
    std::vector<double> t;
    std::vector<double> var_mc;
    std::vector<double> std_err;
    std::vector<double> var_analytic;  // delta-noise closed form at the same lambda, d
};

/// Monte Carlo variance curve. The force is held constant over each step and
/// the damped motion is integrated exactly across it.
inline VarianceCurve langevin_run(const LangevinParams& prm) {
    prm.validate();
    const std::size_t steps = prm.steps();
    const std::size_t stride = steps / prm.n_output;
    const std::size_t n_out = steps / stride;
    const double h = prm.dt;
    const double l = prm.lambda_damp;
    const double decay = std::exp(-l * h);
    const double g1 = -std::expm1(-l * h) / l;  // (1 - e^{-lh}) / lambda
    const double g2 = (h - g1) / l;

    NoiseSynthesizer synth(prm.kernel, h, steps);
    std::vector<double> sq(prm.n_realizations * n_out);

    parallel_for(prm.n_realizations, prm.workers, [&](std::size_t r) {
        std::mt19937_64 rng(stream_seed(prm.master_seed, r));
        const auto xi = synth.draw(rng);
        double v = 0.0;
        double x = 0.0;
        std::size_t k_out = 0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double xn = x + v * g1 + xi[k] * g2;
            v = v * decay + xi[k] * g1;
            x = xn;
            if ((k + 1) % stride == 0 && k_out < n_out) {
                sq[r * n_out + k_out] = x * x;
                ++k_out;
            }
        }
    });

    VarianceCurve c;
    const double R = static_cast<double>(prm.n_realizations);
    for (std::size_t j = 0; j < n_out; ++j) {
        double m = 0.0;
        for (std::size_t r = 0; r < prm.n_realizations; ++r) m += sq[r * n_out + j];
        m /= R;
        double s2 = 0.0;
        for (std::size_t r = 0; r < prm.n_realizations; ++r) {
            const double dv = sq[r * n_out + j] - m;
            s2 += dv * dv;
        }
        s2 /= (R - 1.0);
        const double t = static_cast<double>((j + 1) * stride) * h;
        c.t.push_back(t);
        c.var_mc.push_back(m);
        c.std_err.push_back(std::sqrt(s2 / R));
        c.var_analytic.push_back(variance_analytic(l, prm.kernel.d, t));
    }
    return c;
}

/// Least-squares slope of a variance curve over t >= from_fraction * t_max.
inline double long_time_slope(const VarianceCurve& c, double from_fraction = 0.5) {
    if (c.t.empty()) throw StatisticsError("empty variance curve");
    const double t0 = from_fraction * c.t.back();
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        if (c.t[i] >= t0) {
            xs.push_back(c.t[i]);
            ys.push_back(c.var_mc[i]);
        }
    }
    return fit_line(xs, ys).slope;
}

/// Position variance as the double integral of phi(t') phi(t'') <xi xi> over
/// [0, t]^2, phi(s) = (1 - e^{lambda (s - t)}) / lambda. For the delta kernel
/// one integration collapses onto the diagonal.
inline double variance_double_integral(const NoiseKernel& kernel, double lambda, double t,
                                       double rel_tol = 1e-6) {
    kernel.validate();
    if (!(lambda > 0.0)) throw ValidationError("variance_double_integral: lambda must be > 0");
    if (!(t > 0.0)) throw ValidationError("variance_double_integral: t must be > 0");
    using boost::math::quadrature::gauss_kronrod;

    auto phi = [lambda, t](double s) { return -std::expm1(lambda * (s - t)) / lambda; };
    const double inner_tol = rel_tol * 1e-3;
    double err = 0.0;
    double l1 = 0.0;
    double value = 0.0;

    if (kernel.kind == KernelKind::delta) {
        value = gauss_kronrod<double, 61>::integrate(
            [&](double s) { return 2.0 * kernel.d * phi(s) * phi(s); }, 0.0, t, 15, inner_tol, &err, &l1);
    } else {
        // Symmetric kernel: integrate the lower triangle t'' < t' and double it.
        auto inner = [&](double tp) {
            double e = 0.0;
            const double v = gauss_kronrod<double, 61>::integrate(
                [&](double tpp) { return phi(tpp) * kernel.covariance(tp - tpp); }, 0.0, tp, 15,
                inner_tol, &e);
            return phi(tp) * v;
        };
        value = 2.0 * gauss_kronrod<double, 61>::integrate(inner, 0.0, t, 15, inner_tol, &err, &l1);
        err *= 2.0;
    }
    if (!(err <= rel_tol * std::max(std::abs(value), 1e-300)) && err > 1e-15) {
        throw StatisticsError("variance_double_integral: quadrature did not reach tolerance (error " +
                              std::to_string(err) + ")");
    }
    return value;
}

}  // namespace qrw
