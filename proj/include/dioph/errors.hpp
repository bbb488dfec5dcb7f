#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankDeficient : Error {
    explicit RankDeficient(const std::string& msg = "matrix is rank deficient") : Error(msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& msg = "incompatible dimensions") : Error(msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg = "work guard tripped") : Error(msg) {}
};

// A zero-test whose interval straddles zero even at maximum precision.
struct AmbiguousValue : Error {
    explicit AmbiguousValue(const std::string& msg = "interval-ambiguous value at max precision")
        : Error(msg) {}
};

struct DegenerateGeometry : Error {
    explicit DegenerateGeometry(const std::string& msg = "degenerate cutoff geometry") : Error(msg) {}
};

struct DegenerateInterval : Error {
    explicit DegenerateInterval(const std::string& msg = "degenerate interval") : Error(msg) {}
};

struct NotSurjective : Error {
    explicit NotSurjective(const std::string& msg = "map is not surjective") : Error(msg) {}
};

struct UseRationalPath : Error {
    explicit UseRationalPath(const std::string& msg =
                                 "system has full rational dimension; use the integer-system path")
        : Error(msg) {}
};

struct NoSolution : Error {
    explicit NoSolution(const std::string& msg = "linear system has no solution") : Error(msg) {}
};

struct NoNearDegeneracy : Error {
    explicit NoNearDegeneracy(const std::string& msg = "no near-degenerate pair below threshold")
        : Error(msg) {}
};

struct ParameterConflict : Error {
    explicit ParameterConflict(const std::string& msg = "construction parameters conflict")
        : Error(msg) {}
};

struct UnreachableCase : Error {
    explicit UnreachableCase(const std::string& msg = "case precluded by rank hypothesis")
        : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace dioph
