#pragma once

// Lattice-walk analysis: windowed discretization of continuous trajectories,
// jump autocorrelation, site histograms and least-squares diffusion slopes.
// Site coordinates are in units of the wavelength, so trapping sites sit on
// multiples of 1/2.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qrw/error.hpp"
#include "qrw/trajectory.hpp"

namespace qrw {

enum class SiteRounding { half_integer, integer };

/// Nearest site; ties go away from zero (std::round semantics).
inline double round_to_site(double q, SiteRounding mode = SiteRounding::half_integer) {
    return mode == SiteRounding::half_integer ? std::round(2.0 * q) / 2.0 : std::round(q);
}

struct DiscreteWalk {
    double period = 0.0;
    std::vector<double> sites;
    std::vector<double> jumps;
};

inline std::vector<double> jumps_of(std::span<const double> sites) {
    std::vector<double> out;
    if (sites.size() < 2) return out;
    out.reserve(sites.size() - 1);
    for (std::size_t n = 0; n + 1 < sites.size(); ++n) {
        out.push_back(sites[n + 1] - sites[n]);
    }
    return out;
}

/// Streaming time average of q(t) over consecutive windows [t0 + (n-1)T, t0 + nT].
/// Samples are joined piecewise linearly and integrated with the trapezoid
/// rule; a window boundary falling between samples is split by linear
/// interpolation.
class WindowAverager {
public:
    static constexpr std::size_t min_samples_per_window = 10;

    WindowAverager(double period, double t0) : period_(period), t0_(t0), window_end_(t0 + period) {
        if (!(period > 0.0)) throw ValidationError("window period must be > 0");
    }

    void push(double t, double q) {
        if (!started_) {
            started_ = true;
            prev_t_ = t;
            prev_q_ = q;
            count_ = 1;
            return;
        }
        const double eps = 1e-9 * period_;
        double ta = prev_t_;
        double qa = prev_q_;
        while (t > window_end_ + eps) {
            const double w = (window_end_ - ta) / (t - ta);
            const double qb = qa + w * (q - qa);
            acc_ += 0.5 * (qa + qb) * (window_end_ - ta);
            close_window();
            ta = window_end_ - period_;
            qa = qb;
        }
        acc_ += 0.5 * (qa + q) * (t - ta);
        ++count_;
        if (std::abs(t - window_end_) <= eps) {
            close_window();
            count_ = 1;
        }
        prev_t_ = t;
        prev_q_ = q;
    }

    const std::vector<double>& means() const { return means_; }

private:
    void close_window() {
        if (count_ < min_samples_per_window) {
            throw StatisticsError("undersampled window " + std::to_string(means_.size() + 1) + ": " +
                                  std::to_string(count_) + " samples (need >= " +
                                  std::to_string(min_samples_per_window) + ")");
        }
        means_.push_back(acc_ / period_);
        acc_ = 0.0;
        count_ = 0;
        ++closed_;
        window_end_ = t0_ + static_cast<double>(closed_ + 1) * period_;
    }

    double period_;
    double t0_;
    double window_end_;
    bool started_ = false;
    double prev_t_ = 0.0;
    double prev_q_ = 0.0;
    double acc_ = 0.0;
    std::size_t count_ = 0;
    std::size_t closed_ = 0;
    std::vector<double> means_;
};

inline DiscreteWalk walk_from_means(std::span<const double> means, double period,
                                    SiteRounding mode) {
    DiscreteWalk w;
    w.period = period;
    w.sites.reserve(means.size());
    for (double m : means) w.sites.push_back(round_to_site(m, mode));
    w.jumps = jumps_of(w.sites);
    return w;
}

inline DiscreteWalk discretize(const Trajectory& traj, double period,
                               SiteRounding mode = SiteRounding::half_integer) {
    if (traj.samples.size() < 2 || traj.duration() < 2.0 * period * (1.0 - 1e-12)) {
        throw StatisticsError("trajectory shorter than two jump periods");
    }
    WindowAverager avg(period, traj.samples.front().t);
    for (const auto& s : traj.samples) avg.push(s.t, s.site_coordinate());
    return walk_from_means(avg.means(), period, mode);
}

struct CorrelationSeries {
    std::vector<double> values;
    bool normalized = true;
};

/// C(tau) = (1/(N-1)) sum_n (j_{n+tau} - <j>)(j_n - <j>), divided by C(0).
inline CorrelationSeries autocorrelation(std::span<const double> jumps, std::size_t tau_max) {
    const std::size_t n = jumps.size();
    if (n < 2) throw StatisticsError("autocorrelation needs at least two jumps");
    if (tau_max > n / 2) throw StatisticsError("tau_max exceeds half the sequence length");

    double mean = 0.0;
    for (double j : jumps) mean += j;
    mean /= static_cast<double>(n);

    std::vector<double> raw(tau_max + 1, 0.0);
    for (std::size_t tau = 0; tau <= tau_max; ++tau) {
        double acc = 0.0;
        for (std::size_t i = 0; i + tau < n; ++i) {
            acc += (jumps[i + tau] - mean) * (jumps[i] - mean);
        }
        raw[tau] = acc / static_cast<double>(n - 1);
    }
    if (raw[0] == 0.0) throw StatisticsError("degenerate jump sequence: all jumps equal");

    CorrelationSeries out;
    out.values.resize(tau_max + 1);
    out.values[0] = 1.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) out.values[tau] = raw[tau] / raw[0];
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw StatisticsError("line fit needs two or more paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw StatisticsError("line fit with constant abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

/// One bin per site; keyed by twice the site coordinate so keys are integers.
class SiteHistogram {
public:
    void add(double site, long count = 1) { counts_[std::lround(2.0 * site)] += count; }

    long total() const {
        long n = 0;
        for (const auto& [k, c] : counts_) n += c;
        return n;
    }

    double mean() const {
        const long n = total();
        if (n == 0) throw StatisticsError("empty histogram");
        double s = 0.0;
        for (const auto& [k, c] : counts_) s += 0.5 * static_cast<double>(k) * static_cast<double>(c);
        return s / static_cast<double>(n);
    }

    /// Sample standard deviation (n - 1 denominator).
    double stddev() const {
        const long n = total();
        if (n < 2) return 0.0;
        const double m = mean();
        double s = 0.0;
        for (const auto& [k, c] : counts_) {
            const double d = 0.5 * static_cast<double>(k) - m;
            s += d * d * static_cast<double>(c);
        }
        return std::sqrt(s / static_cast<double>(n - 1));
    }

    /// (site, count) in increasing site order.
    std::vector<std::pair<double, long>> bins() const {
        std::vector<std::pair<double, long>> out;
        out.reserve(counts_.size());
        for (const auto& [k, c] : counts_) out.emplace_back(0.5 * static_cast<double>(k), c);
        return out;
    }

    /// Sum over sites of min(p_a, p_b) after normalising both histograms.
    friend double overlap_coefficient(const SiteHistogram& a, const SiteHistogram& b) {
        const double na = static_cast<double>(a.total());
        const double nb = static_cast<double>(b.total());
        if (na == 0.0 || nb == 0.0) throw StatisticsError("overlap of an empty histogram");
        double s = 0.0;
        for (const auto& [k, c] : a.counts_) {
            auto it = b.counts_.find(k);
            if (it != b.counts_.end()) {
                s += std::min(static_cast<double>(c) / na, static_cast<double>(it->second) / nb);
            }
        }
        return s;
    }

private:
    std::map<long, long> counts_;
};

}  // namespace qrw
