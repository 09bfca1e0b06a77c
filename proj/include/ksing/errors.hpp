#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ksing {

// Base of all library failures.  `code` is the machine-readable reason the
// CLI maps onto exit codes (2 for domain-class, 3 for convergence-class).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& what) : Error("divergence", what) {}
};

struct MonotonicityError : Error {
    explicit MonotonicityError(const std::string& what) : Error("monotonicity", what) {}
};

struct UnclassifiableError : Error {
    explicit UnclassifiableError(const std::string& what) : Error("unclassifiable", what) {}
};

struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error("no-convergence", what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

struct BarrierEscapeError : Error {
    explicit BarrierEscapeError(const std::string& what) : Error("barrier-escape", what) {}
};

struct BracketError : Error {
    BracketError(const std::string& what, std::vector<std::pair<double, double>> fv)
        : Error("bracket-failure", what), f_values(std::move(fv)) {}
    std::vector<std::pair<double, double>> f_values;
};

struct ShootingError : Error {
    explicit ShootingError(const std::string& what) : Error("shooting-failure", what) {}
};

}  // namespace ksing
