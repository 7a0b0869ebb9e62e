#pragma once

#include <stdexcept>
#include <string>

namespace besselaf {

// Invalid argument outside an operation's mathematical domain.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure failed to reach its requested accuracy.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what, double achieved_error = 0.0)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

// lambda_srd == lambda_sd makes the series CDF coefficients singular.
class degenerate_parameter_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

namespace detail {

inline void require(bool condition, const char* message) {
    if (!condition) throw domain_error(message);
}

}  // namespace detail
}  // namespace besselaf
