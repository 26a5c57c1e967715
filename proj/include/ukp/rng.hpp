#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ukp {

// Deterministic random stream. All distributions are built from raw mt19937_64
// output so results are identical across standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed), gen_seed_(seed) {}

    // Derive an independent stream, e.g. one per worker or per shape.
    Rng derive(uint64_t stream) const {
        uint64_t z = seed_mix_(gen_seed_ ^ (stream + 0x9e3779b97f4a7c15ULL));
        return Rng(z, true);
    }

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    int64_t uniform_int(int64_t n) {
        // Rejection sampling keeps the distribution exact.
        uint64_t un = static_cast<uint64_t>(n);
        uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int64_t>(x % un);
    }

    // Standard normal via Box-Muller (pair cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // log of a Gamma(alpha, 1) sample; stable for very small alpha.
    double log_gamma_sample(double alpha) {
        if (alpha < 1.0) {
            // Boost: G(a) = G(a+1) * U^(1/a), done in log space.
            double lg = log_gamma_sample(alpha + 1.0);
            double u;
            do {
                u = uniform01();
            } while (u <= 0.0);
            return lg + std::log(u) / alpha;
        }
        // Marsaglia-Tsang squeeze method.
        double d = alpha - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
        }
    }

    double gamma(double alpha) { return std::exp(log_gamma_sample(alpha)); }

    // Beta(a, b) via the Gamma-ratio construction, computed in log space so
    // tiny shape parameters do not underflow to 0/0.
    double beta(double a, double b) {
        double lga = log_gamma_sample(a);
        double lgb = log_gamma_sample(b);
        // Ga / (Ga + Gb) = sigmoid(log Ga - log Gb)
        double t = lga - lgb;
        if (t >= 0.0)
            return 1.0 / (1.0 + std::exp(-t));
        double e = std::exp(t);
        return e / (1.0 + e);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(static_cast<int64_t>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    Rng(uint64_t mixed, bool) : gen_(mixed), gen_seed_(mixed) {}

    static uint64_t seed_mix_(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
    uint64_t gen_seed_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ukp
