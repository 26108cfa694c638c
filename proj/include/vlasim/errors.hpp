#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vlasim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A config document does not match its schema (missing/unknown/badly typed
// key). `key` names the offending key.
struct ParseError : Error {
    std::string key;
    ParseError(std::string k, const std::string& msg)
        : Error(msg), key(std::move(k)) {}
};

// A structurally valid document violates a domain invariant.
struct ValidationError : Error {
    std::string key;
    ValidationError(std::string k, const std::string& msg)
        : Error(msg), key(std::move(k)) {}
};

// An operation was asked for something the given spec cannot provide
// (e.g. the PIM domain of a PIM-less system).
struct ConfigError : Error {
    using Error::Error;
};

// scale_to could not reach the target parameter count.
struct ScalingError : Error {
    std::uint64_t nearest_params = 0;
    ScalingError(const std::string& msg, std::uint64_t nearest)
        : Error(msg), nearest_params(nearest) {}
};

// Strict-mode device memory overflow.
struct CapacityError : Error {
    std::uint64_t overflow_bytes = 0;
    CapacityError(const std::string& msg, std::uint64_t overflow)
        : Error(msg), overflow_bytes(overflow) {}
};

// A referenced file could not be read.
struct FileError : Error {
    std::string path;
    FileError(std::string p, const std::string& msg)
        : Error(msg), path(std::move(p)) {}
};

}  // namespace vlasim
