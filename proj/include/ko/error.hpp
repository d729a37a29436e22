#pragma once

#include <stdexcept>
#include <string>

namespace ko {

enum class ErrorKind {
    Input,        // malformed or non-finite data
    Parameter,    // argument outside its admissible range
    Hypothesis,   // nonlinearity fails a theorem hypothesis
    Domain,       // evaluation outside the represented domain
    Integration,  // numerical failure of the ODE integrator or quadrature
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace ko
