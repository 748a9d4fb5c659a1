#include "keyecho/error.hpp"

namespace keyecho {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::FrameTooLong: return "FrameTooLong";
    case ErrorCode::NotEnoughPeaks: return "NotEnoughPeaks";
    case ErrorCode::TooFewOnsets: return "TooFewOnsets";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositiveDelta: return "NonPositiveDelta";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::CandidateExplosion: return "CandidateExplosion";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::UnknownPair: return "UnknownPair";
    case ErrorCode::OnsetOutOfRange: return "OnsetOutOfRange";
    }
    return "Unknown";
}

} // namespace keyecho
