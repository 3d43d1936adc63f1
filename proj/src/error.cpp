#include "qmaps/error.h"

namespace qmaps {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotInvolution: return "NotInvolution";
        case ErrorCode::NotPermutation: return "NotPermutation";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::RootOutOfRange: return "RootOutOfRange";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::EmptyTree: return "EmptyTree";
        case ErrorCode::SizeTooLarge: return "SizeTooLarge";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::NotQuadrangulation: return "NotQuadrangulation";
        case ErrorCode::NotPointed: return "NotPointed";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ResolutionZero: return "ResolutionZero";
        case ErrorCode::NotCovering: return "NotCovering";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::SplitFailed: return "SplitFailed";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::NoValidPair: return "NoValidPair";
        case ErrorCode::MalformedCSV: return "MalformedCSV";
    }
    return "Unknown";
}

}  // namespace qmaps
