#pragma once

#include <stdexcept>
#include <string>

namespace stabrec {

// Error categories map 1:1 onto CLI exit codes and C API status values.
enum class ErrorCode {
    usage = 1,    // invalid arguments, shape mismatches, bad configuration
    data = 2,     // unreadable/empty inputs, malformed files
    numeric = 3,  // factorization failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
    throw Error(ErrorCode::usage, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
    throw Error(ErrorCode::data, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
    throw Error(ErrorCode::numeric, msg);
}

}  // namespace stabrec
