#include "mgc/error.hpp"

namespace mgc {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NonPrimeP:
            return "NonPrimeP";
        case Errc::ReducibleModulus:
            return "ReducibleModulus";
        case Errc::FactorizationTooLarge:
            return "FactorizationTooLarge";
        case Errc::RingMismatch:
            return "RingMismatch";
        case Errc::NonUnit:
            return "NonUnit";
        case Errc::ShapeMismatch:
            return "ShapeMismatch";
        case Errc::NonInvertible:
            return "NonInvertible";
        case Errc::DegreeMismatch:
            return "DegreeMismatch";
        case Errc::ArityMismatch:
            return "ArityMismatch";
        case Errc::NoSuchEmbedding:
            return "NoSuchEmbedding";
        case Errc::IncompatibleDegrees:
            return "IncompatibleDegrees";
        case Errc::IndexOutOfRange:
            return "IndexOutOfRange";
        case Errc::AlphabetMismatch:
            return "AlphabetMismatch";
        case Errc::DegeneratePair:
            return "DegeneratePair";
        case Errc::TerminalLetterViolation:
            return "TerminalLetterViolation";
        case Errc::BudgetTooSmall:
            return "BudgetTooSmall";
        case Errc::TypeError:
            return "TypeError";
        case Errc::NotInLeafGroup:
            return "NotInLeafGroup";
        case Errc::InvalidAutomorphism:
            return "InvalidAutomorphism";
        case Errc::NotInGroup:
            return "NotInGroup";
        case Errc::UnsupportedDecomposition:
            return "UnsupportedDecomposition";
        case Errc::NotWreathShaped:
            return "NotWreathShaped";
        case Errc::NotDecomposable:
            return "NotDecomposable";
        case Errc::NoSolution:
            return "NoSolution";
        case Errc::BadPartyCount:
            return "BadPartyCount";
        case Errc::ScheduleMismatch:
            return "ScheduleMismatch";
        case Errc::DegenerateKey:
            return "DegenerateKey";
        case Errc::CapExceeded:
            return "CapExceeded";
        case Errc::NoSolutionSpace:
            return "NoSolutionSpace";
        case Errc::Failure:
            return "Failure";
        case Errc::ParseError:
            return "ParseError";
        case Errc::InvalidArgument:
            return "InvalidArgument";
    }
    return "Error";
}

}  // namespace mgc
