#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfv {

// Error categories map 1:1 onto process exit codes and C API status values.
enum class ErrCategory : int {
    usage   = 2,  // bad arguments, invalid specs, contract violations
    config  = 3,  // config / lineage mismatch between artifacts
    numeric = 4,  // training or sampling divergence
    io      = 5,  // filesystem, parse, format errors
};

class Error : public std::runtime_error {
public:
    Error(ErrCategory cat, const std::string& msg)
        : std::runtime_error(msg), category(cat) {}
    ErrCategory category;
};

[[noreturn]] inline void fail_usage(const std::string& msg)   { throw Error(ErrCategory::usage, msg); }
[[noreturn]] inline void fail_config(const std::string& msg)  { throw Error(ErrCategory::config, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrCategory::numeric, msg); }
[[noreturn]] inline void fail_io(const std::string& msg)      { throw Error(ErrCategory::io, msg); }

inline void require(bool cond, ErrCategory cat, const std::string& msg) {
    if (!cond) throw Error(cat, msg);
}

}  // namespace mfv
