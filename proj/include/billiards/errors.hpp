#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

enum class ErrorKind {
    ZeroDirection,
    OverlapInput,
    NotInContact,
    Receding,
    SimultaneousCollision,
    PrecisionExhausted,
    PersistentContact,
    InvalidInjection,
    BadN,
    BadParams,
    BadFamilies,
    Eps0TooLarge,
    StageCountShortfall,
    AlignmentNotFound,
    TuningFailed,
    BadGaps,
    NotABreakpoint,
    ShapeMismatch,
    Parse,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, int stage = -1)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind), stage_(stage) {}
    ErrorKind kind() const { return kind_; }
    // Stage index for StageCountShortfall (0 = preparation), -1 otherwise.
    int stage() const { return stage_; }

private:
    ErrorKind kind_;
    int stage_;
};

} // namespace billiards
