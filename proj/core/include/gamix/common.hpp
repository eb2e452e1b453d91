#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gamix {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A required column is missing or a header does not match the expected schema.
struct SchemaError : Error {
    using Error::Error;
};

// Input rows violate a precondition (empty dataset, bad label, unrealizable ratio, ...).
struct DataError : Error {
    using Error::Error;
};

// Invalid experiment or generator configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Iterative solver hit its iteration cap before reaching tolerance.
struct ConvergenceError : Error {
    double residual;
    ConvergenceError(const std::string& msg, double residual_)
        : Error(msg), residual(residual_) {}
};

// Training diverged (non-finite loss).
struct TrainingError : Error {
    int epoch;
    TrainingError(const std::string& msg, int epoch_) : Error(msg), epoch(epoch_) {}
};

using Rng = std::mt19937_64;

// splitmix64 finalizer; stateless mixing for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and one or more tags.
// derive_seed(s, a, b) != derive_seed(s, b, a) by construction.
template <typename... Tags>
inline std::uint64_t derive_seed(std::uint64_t base, Tags... tags) {
    std::uint64_t h = mix64(base);
    ((h = mix64(h ^ static_cast<std::uint64_t>(tags))), ...);
    return h;
}

inline double clamp_unit(double v) {
    if (v < -1.0) return -1.0;
    if (v > 1.0) return 1.0;
    return v;
}

}  // namespace gamix
