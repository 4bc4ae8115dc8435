// common.hpp — Shared error types, tolerances, permutations, deterministic RNG
// and an index-ordered parallel map used by the sampling harness.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace simplexreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Default tolerances used across the library. Operations that need a
// different one take it as a parameter.
namespace tol {
inline constexpr double entry = 1e-12;        // probability entries / sums
inline constexpr double kernel_rank = 1e-10;  // rank decisions on generators
inline constexpr double witness = 1e-10;      // stochastic witness residuals
inline constexpr double vertex_merge = 1e-9;  // polytope vertex dedup radius
inline constexpr double lp_feasible = 1e-9;   // LP phase-1 objective cutoff
}  // namespace tol

// ------------------------------- errors -------------------------------------

struct invalid_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Finite-temperature operation called in a zero-temperature regime.
struct regime_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct degenerate_generator_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numerical_failure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerically checkable claim failed; reported, never silently patched.
struct violation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----------------------------- permutations ---------------------------------

// Permutation of {0..n-1} in "source index" form: apply(x)[i] = x[src[i]].
// Equivalently the matrix P with P(i, src[i]) = 1 acting as y = P x.
class Permutation {
  public:
    Permutation() = default;

    explicit Permutation(std::vector<int> src) : src_(std::move(src)) {
        std::vector<char> seen(src_.size(), 0);
        for (int s : src_) {
            if (s < 0 || s >= static_cast<int>(src_.size()) || seen[s]) {
                throw invalid_input_error("Permutation: not a permutation of 0..n-1");
            }
            seen[s] = 1;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> src(static_cast<std::size_t>(n));
        std::iota(src.begin(), src.end(), 0);
        return Permutation(std::move(src));
    }

    static Permutation transposition(int n, int i, int j) {
        Permutation p = identity(n);
        std::swap(p.src_[static_cast<std::size_t>(i)], p.src_[static_cast<std::size_t>(j)]);
        return p;
    }

    int size() const { return static_cast<int>(src_.size()); }
    int operator[](int i) const { return src_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& source_indices() const { return src_; }

    bool is_identity() const {
        for (int i = 0; i < size(); ++i)
            if (src_[static_cast<std::size_t>(i)] != i) return false;
        return true;
    }

    Vector apply(const Vector& x) const {
        if (x.size() != size()) throw invalid_input_error("Permutation::apply: size mismatch");
        Vector y(x.size());
        for (int i = 0; i < size(); ++i) y[i] = x[src_[static_cast<std::size_t>(i)]];
        return y;
    }

    Matrix matrix() const {
        Matrix P = Matrix::Zero(size(), size());
        for (int i = 0; i < size(); ++i) P(i, src_[static_cast<std::size_t>(i)]) = 1.0;
        return P;
    }

    Permutation inverse() const {
        std::vector<int> inv(src_.size());
        for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(src_[static_cast<std::size_t>(i)])] = i;
        return Permutation(std::move(inv));
    }

    // (p * q).apply(x) == p.apply(q.apply(x))
    Permutation operator*(const Permutation& q) const {
        std::vector<int> comp(src_.size());
        for (int i = 0; i < size(); ++i)
            comp[static_cast<std::size_t>(i)] = q.src_[static_cast<std::size_t>(src_[static_cast<std::size_t>(i)])];
        return Permutation(std::move(comp));
    }

    bool operator==(const Permutation& o) const { return src_ == o.src_; }

  private:
    std::vector<int> src_;
};

// All n! permutations in lexicographic order of their source vectors.
inline std::vector<Permutation> all_permutations(int n) {
    if (n < 1 || n > 8) throw size_error("all_permutations: n out of supported range");
    std::vector<int> src(static_cast<std::size_t>(n));
    std::iota(src.begin(), src.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(src);
    } while (std::next_permutation(src.begin(), src.end()));
    return out;
}

// ------------------------------ deterministic RNG ----------------------------

// splitmix64; used both directly and to key per-run generators. Hand-rolled so
// that streams are identical across platforms and thread schedules.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derive an independent stream for run `index` from a master seed.
    static Rng for_run(std::uint64_t master_seed, std::uint64_t index) {
        Rng mix(master_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        mix.next_u64();
        return mix;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // log10-uniform over [10^lo_exp, 10^hi_exp].
    double log_uniform(double lo_exp, double hi_exp) {
        return std::pow(10.0, uniform(lo_exp, hi_exp));
    }

  private:
    std::uint64_t state_;
};

// --------------------------- ordered parallel map ---------------------------

// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
// results ordered by index. Work items must be independent; determinism of
// the merged output then holds for any thread count.
template <typename T>
std::vector<T> parallel_indexed(int count, int threads, const std::function<T(int)>& fn) {
    std::vector<T> results(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return results;
    threads = std::max(1, std::min({threads, count, 64}));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
        return results;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < count; i += threads) results[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// --------------------------------- logging ----------------------------------

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("SIMPLEX_REACH_LOG");
        if (!env) return LogLevel::warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::error;
        if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[simplex-reach %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace simplexreach
