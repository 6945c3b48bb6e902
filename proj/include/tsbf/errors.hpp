#ifndef TSBF_ERRORS_HPP
#define TSBF_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace tsbf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NotPSD : public Error {
public:
    using Error::Error;
};

class SingularChannel : public Error {
public:
    using Error::Error;
};

class InfeasibleBD : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when the trace-quotient iteration hits its cap; carries the
/// objective values computed so far.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, std::vector<double> partial_trace)
        : Error(what), partial_trace_(std::move(partial_trace)) {}

    const std::vector<double>& partial_trace() const noexcept { return partial_trace_; }

private:
    std::vector<double> partial_trace_;
};

}  // namespace tsbf

#endif  // TSBF_ERRORS_HPP
