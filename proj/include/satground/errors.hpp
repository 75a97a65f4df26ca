#pragma once

#include <stdexcept>
#include <string>

namespace satground {

// Error classes map 1:1 to CLI exit codes.
enum class ErrorClass : int {
    Usage = 2,       // bad parameter values or flags
    Io = 3,          // unreadable, unwritable or unparseable files
    Contract = 4,    // domain, shape or interface-contract violations
    Validation = 5,  // semantic validation of otherwise well-formed data failed
};

inline const char* error_class_name(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::Usage: return "usage";
        case ErrorClass::Io: return "io";
        case ErrorClass::Contract: return "contract";
        case ErrorClass::Validation: return "validation";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& msg) : std::runtime_error(msg), cls_(cls) {}

    ErrorClass error_class() const { return cls_; }
    int exit_code() const { return static_cast<int>(cls_); }

private:
    ErrorClass cls_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(ErrorClass::Usage, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorClass::Io, msg) {}
};

struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(ErrorClass::Contract, msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(ErrorClass::Validation, msg) {}
};

}  // namespace satground
