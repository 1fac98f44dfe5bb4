#include "reingame/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

namespace reingame {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Small self-contained generator: xoshiro-free, library-independent output
// so reports are reproducible across toolchains.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, long long path, std::uint32_t stream) {
        std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path) + 1));
        s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(stream) + 0x5851F42DULL));
        state_[0] = splitmix64(s);
        state_[1] = splitmix64(state_[0]);
        state_[2] = splitmix64(state_[1]);
        state_[3] = splitmix64(state_[2]);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    std::uint64_t state_[4] = {};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

double ControlSchedule::total() const {
    double sum = 0.0;
    for (const auto& [time, amount] : purchases) sum += amount;
    return sum;
}

ControlSchedule generate_strategy(const GameState& state, const ReinsuranceLaw& law,
                                  const PremiumPath& premium, const InsurerParams& insurer,
                                  const Horizon& horizon) {
    validate_state(state, horizon);
    ControlSchedule schedule;
    const double remaining = horizon.ceiling - state.coverage;
    if (remaining <= 0.0) {
        return schedule;
    }
    const auto p = purchase_time(state.time, premium, insurer, horizon);
    if (!p.finite()) {
        return schedule;
    }
    const double tol = 1e-9 * std::max(1.0, horizon.terminal_time);
    if (!law.contains(p.time(), tol)) {
        throw std::invalid_argument("law does not contain the premium's first crossing time");
    }
    schedule.purchases.emplace_back(p.time(), remaining);
    return schedule;
}

std::vector<double> build_time_grid(double t0, double terminal_time, int n_steps,
                                    const std::vector<double>& extras) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    std::set<double> points;
    points.insert(t0);
    points.insert(terminal_time);
    for (int i = 1; i < n_steps; ++i) {
        points.insert(t0 + (terminal_time - t0) * static_cast<double>(i) / n_steps);
    }
    for (double e : extras) {
        points.insert(std::clamp(e, t0, terminal_time));
    }
    return {points.begin(), points.end()};
}

std::vector<double> sample_terminal(double x0, const OuParams& ou,
                                    const std::vector<double>& times,
                                    const std::vector<std::pair<double, double>>& signed_lumps,
                                    long long n_paths, std::uint64_t seed, std::uint32_t stream,
                                    int n_threads) {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    const std::size_t m = times.size();

    // lump amounts aligned to grid nodes; lump times must be grid members
    std::vector<double> lump_at(m, 0.0);
    for (const auto& [time, amount] : signed_lumps) {
        auto it = std::lower_bound(times.begin(), times.end(), time);
        if (it == times.end() || *it != time) {
            throw std::invalid_argument("lump time is not a grid node");
        }
        lump_at[static_cast<std::size_t>(std::distance(times.begin(), it))] += amount;
    }

    const std::size_t n_steps = m > 0 ? m - 1 : 0;
    std::vector<double> step_decay(n_steps), step_sigma(n_steps);
    const double level = ou.drift_level / ou.reversion;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double dt = times[k + 1] - times[k];
        const double e = std::exp(-ou.reversion * dt);
        step_decay[k] = e;
        step_sigma[k] =
            ou.volatility * std::sqrt((1.0 - e * e) / (2.0 * ou.reversion));
    }

    std::vector<double> terminal(static_cast<std::size_t>(n_paths));
    auto worker = [&](long long begin, long long end) {
        for (long long i = begin; i < end; ++i) {
            GaussianStream rng(seed, i, stream);
            double x = x0 + lump_at[0];
            for (std::size_t k = 0; k < n_steps; ++k) {
                x = level + (x - level) * step_decay[k] + step_sigma[k] * rng.normal();
                x += lump_at[k + 1];
            }
            terminal[static_cast<std::size_t>(i)] = x;
        }
    };

    const int workers = std::max(1, n_threads);
    if (workers == 1 || n_paths < 2 * workers) {
        worker(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const long long chunk = (n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long long begin = w * chunk;
            const long long end = std::min(n_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return terminal;
}

SampleMoments moments(const std::vector<double>& samples) {
    SampleMoments out;
    out.n = static_cast<long long>(samples.size());
    if (out.n == 0) return out;
    double sum = 0.0, comp = 0.0;
    for (double v : samples) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    out.mean = sum / static_cast<double>(out.n);
    if (out.n < 2) return out;
    double m2 = 0.0, m4 = 0.0;
    for (double v : samples) {
        const double d = v - out.mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    out.variance = m2 / static_cast<double>(out.n - 1);
    out.fourth_central = m4 / static_cast<double>(out.n);
    return out;
}

double SampleMoments::mean_std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(variance / static_cast<double>(n));
}

double SampleMoments::variance_std_error() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double v = fourth_central - variance * variance * (nn - 3.0) / (nn - 1.0);
    return std::sqrt(std::max(0.0, v) / nn);
}

double discounted_premium(const ControlSchedule& schedule, const PremiumPath& premium,
                          double discount, double terminal_time) {
    double total = 0.0;
    for (const auto& [time, amount] : schedule.purchases) {
        total += std::exp(discount * (terminal_time - time)) * premium(time) * amount;
    }
    return total;
}

SimulatedObjectives simulate(const GameState& state, const PremiumPath& premium,
                             const GameParameters& params, const McConfig& mc, int n_threads) {
    validate(params);
    validate_state(state, params.horizon);

    const double T = params.horizon.terminal_time;
    const auto p = purchase_time(state.time, premium, params.insurer, params.horizon);
    ControlSchedule schedule;
    const double remaining = params.horizon.ceiling - state.coverage;
    if (p.finite() && remaining > 0.0) {
        schedule.purchases.emplace_back(p.time(), remaining);
    }

    std::vector<double> extras;
    for (const auto& [time, amount] : schedule.purchases) extras.push_back(time);
    const auto times = build_time_grid(state.time, T, mc.n_steps, extras);

    std::vector<std::pair<double, double>> minus_lumps, plus_lumps;
    for (const auto& [time, amount] : schedule.purchases) {
        minus_lumps.emplace_back(time, -amount);
        plus_lumps.emplace_back(time, amount);
    }

    const OuParams ou_insurer{params.insurer.drift_level, params.insurer.reversion,
                              params.insurer.volatility};
    const OuParams ou_reinsurer{params.reinsurer.drift_level, params.reinsurer.reversion,
                                params.reinsurer.volatility};

    const auto x_terminal = sample_terminal(state.exposure, ou_insurer, times, minus_lumps,
                                            mc.n_paths, mc.seed, 0, n_threads);
    const auto z_terminal = sample_terminal(state.reinsurer_exposure, ou_reinsurer, times,
                                            plus_lumps, mc.n_paths, mc.seed, 1, n_threads);

    const auto mx = moments(x_terminal);
    const auto mz = moments(z_terminal);

    const double paid_insurer = discounted_premium(schedule, premium, params.insurer.discount, T);
    const double paid_reinsurer =
        discounted_premium(schedule, premium, params.reinsurer.discount, T);

    SimulatedObjectives out;
    out.purchase_time_used = p;
    out.mean_XT = {mx.mean, mx.mean_std_error(), mc.n_paths, mc.seed};
    out.var_XT = {mx.variance, mx.variance_std_error(), mc.n_paths, mc.seed};
    out.premium_cost = {paid_insurer, 0.0, mc.n_paths, mc.seed};
    out.premium_reinsurer = {paid_reinsurer, 0.0, mc.n_paths, mc.seed};

    const double gi = params.insurer.variance_weight;
    out.j_insurer = {mx.mean + gi * mx.variance + params.insurer.premium_weight * paid_insurer,
                     std::sqrt(std::pow(mx.mean_std_error(), 2) +
                               gi * gi * std::pow(mx.variance_std_error(), 2)),
                     mc.n_paths, mc.seed};
    const double gr = params.reinsurer.variance_weight;
    out.j_reinsurer = {
        mz.mean + gr * mz.variance - params.reinsurer.premium_weight * paid_reinsurer,
        std::sqrt(std::pow(mz.mean_std_error(), 2) + gr * gr * std::pow(mz.variance_std_error(), 2)),
        mc.n_paths, mc.seed};
    return out;
}

std::vector<McEstimate> variance_profile(const GameState& state,
                                         const std::vector<double>& purchase_times,
                                         const GameParameters& params, const McConfig& mc,
                                         int n_threads) {
    validate(params);
    validate_state(state, params.horizon);
    const double T = params.horizon.terminal_time;
    for (double s : purchase_times) {
        if (!(s >= state.time && s <= T)) {
            throw std::domain_error("purchase time outside [t, T]");
        }
    }
    const OuParams ou{params.insurer.drift_level, params.insurer.reversion,
                      params.insurer.volatility};
    const double remaining = params.horizon.ceiling - state.coverage;

    std::vector<McEstimate> out;
    out.reserve(purchase_times.size());
    for (double s : purchase_times) {
        const auto times = build_time_grid(state.time, T, mc.n_steps, {s});
        const auto terminal = sample_terminal(state.exposure, ou, times, {{s, -remaining}},
                                              mc.n_paths, mc.seed, 0, n_threads);
        const auto m = moments(terminal);
        out.push_back({m.variance, m.variance_std_error(), mc.n_paths, mc.seed});
    }
    return out;
}

}  // namespace reingame
