#include "carc/errors.hpp"

namespace carc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::EmptyStack: return "EmptyStack";
    case ErrorCode::NotTerminal: return "NotTerminal";
    case ErrorCode::UnvisitedChild: return "UnvisitedChild";
    case ErrorCode::NoLegalActions: return "NoLegalActions";
    case ErrorCode::AgentFailure: return "AgentFailure";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Divergence: return "Divergence";
  }
  return "Unknown";
}

}  // namespace carc
