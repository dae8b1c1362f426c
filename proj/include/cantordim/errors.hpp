#ifndef CANTORDIM_ERRORS_HPP
#define CANTORDIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cantordim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A query needs a generation beyond the last one an explicit system defines.
class HorizonExceeded : public Error {
public:
    using Error::Error;
};

/// A finite-horizon classification could not decide either way.
class Inconclusive : public Error {
public:
    using Error::Error;
};

/// The regularizer was asked to run a case that the input does not fall into.
class CaseMismatch : public Error {
public:
    using Error::Error;
};

/// An optimization or root-finding problem has no admissible solution.
class Infeasible : public Error {
public:
    using Error::Error;
};

/// Configuration document error, anchored at a JSON field path.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace cantordim

#endif  // CANTORDIM_ERRORS_HPP
