#ifndef PEVGRID_ERRORS_HPP
#define PEVGRID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pevgrid {

// Bad user input: unreadable files, schema violations, out-of-range
// parameters. CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Power-flow non-convergence. Carries the slot (and, when running under
// MCS, the iteration) where the solve failed. CLI maps this to exit code 2.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& msg, long slot = -1, long iteration = -1)
        : std::runtime_error(msg), slot(slot), iteration(iteration)
    {
    }

    long slot;
    long iteration;
};

} // namespace pevgrid

#endif
