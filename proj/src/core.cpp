#include "exitlab/core.hpp"

namespace exitlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MultipleMinimaFound: return "MultipleMinimaFound";
    case ErrorCode::DegenerateBoundaryMinimum: return "DegenerateBoundaryMinimum";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EmptyAnnulus: return "EmptyAnnulus";
    case ErrorCode::AlphaNonPositive: return "AlphaNonPositive";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::InvalidTemperature: return "InvalidTemperature";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::AllParticlesExited: return "AllParticlesExited";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::AllCensored: return "AllCensored";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::ZeroMeanTau: return "ZeroMeanTau";
    case ErrorCode::ZeroCount: return "ZeroCount";
    case ErrorCode::AbsorbingState: return "AbsorbingState";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

double ParamMap::scalar(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::InvalidParams, "missing parameter '" + key + "'");
  if (it->second.size() != 1)
    throw Error(ErrorCode::InvalidParams, "parameter '" + key + "' must be a scalar");
  return it->second.front();
}

double ParamMap::scalar_or(const std::string& key, double fallback) const {
  return has(key) ? scalar(key) : fallback;
}

const std::vector<double>& ParamMap::array(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::InvalidParams, "missing parameter '" + key + "'");
  return it->second;
}

}  // namespace exitlab
