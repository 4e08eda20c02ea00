#pragma once

#include <stdexcept>
#include <string>

namespace mgc {

// Error kinds raised across the library. The CLI maps these to exit code 1.
enum class Errc {
    NonPrimeP,
    ReducibleModulus,
    FactorizationTooLarge,
    RingMismatch,
    NonUnit,
    ShapeMismatch,
    NonInvertible,
    DegreeMismatch,
    ArityMismatch,
    NoSuchEmbedding,
    IncompatibleDegrees,
    IndexOutOfRange,
    AlphabetMismatch,
    DegeneratePair,
    TerminalLetterViolation,
    BudgetTooSmall,
    TypeError,
    NotInLeafGroup,
    InvalidAutomorphism,
    NotInGroup,
    UnsupportedDecomposition,
    NotWreathShaped,
    NotDecomposable,
    NoSolution,
    BadPartyCount,
    ScheduleMismatch,
    DegenerateKey,
    CapExceeded,
    NoSolutionSpace,
    Failure,
    ParseError,
    InvalidArgument,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mgc
