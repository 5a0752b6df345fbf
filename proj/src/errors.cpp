#include "billiards/errors.hpp"

namespace billiards {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::ZeroDirection: return "ZeroDirection";
    case ErrorKind::OverlapInput: return "OverlapInput";
    case ErrorKind::NotInContact: return "NotInContact";
    case ErrorKind::Receding: return "Receding";
    case ErrorKind::SimultaneousCollision: return "SimultaneousCollision";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::PersistentContact: return "PersistentContact";
    case ErrorKind::InvalidInjection: return "InvalidInjection";
    case ErrorKind::BadN: return "BadN";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::BadFamilies: return "BadFamilies";
    case ErrorKind::Eps0TooLarge: return "Eps0TooLarge";
    case ErrorKind::StageCountShortfall: return "StageCountShortfall";
    case ErrorKind::AlignmentNotFound: return "AlignmentNotFound";
    case ErrorKind::TuningFailed: return "TuningFailed";
    case ErrorKind::BadGaps: return "BadGaps";
    case ErrorKind::NotABreakpoint: return "NotABreakpoint";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

} // namespace billiards
