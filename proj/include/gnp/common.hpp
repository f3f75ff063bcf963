#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gnp {

using Vec2 = Eigen::Vector2d;

/// Raised for malformed or inconsistent input data (CSV rows, frame order, ...).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for invalid configuration values or unknown keys.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised on tensor shape mismatches.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a computation produces NaN/Inf or hits a degenerate case
/// that has no defined result (e.g. attention with every key masked).
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// splitmix64 step; used to derive independent per-item seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0x517cc1b727220a95ULL * (index + 1));
    return splitmix64(s);
}

/// Fixed-precision decimal formatting; used everywhere we emit numbers into
/// files so reruns are byte-identical.
inline std::string fmt_fixed(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return std::string(buf);
}

/// FNV-1a 64-bit, for config/manifest hashing.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace gnp
