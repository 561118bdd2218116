#pragma once

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace exitlab {

/// Largest supported ambient dimension. Points and matrices live on the stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

enum class ErrorCode {
  UnknownName,
  InvalidParams,
  PreconditionViolated,
  NoConvergence,
  MultipleMinimaFound,
  DegenerateBoundaryMinimum,
  PointOutsideDomain,
  Disconnected,
  EmptyAnnulus,
  AlphaNonPositive,
  Inconclusive,
  InvalidTemperature,
  InvalidWindow,
  AllParticlesExited,
  ZeroVariance,
  AllCensored,
  TooFewSamples,
  DegenerateWindow,
  ZeroMeanTau,
  ZeroCount,
  AbsorbingState,
  QuadratureFailure,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Named scalar or array parameters. Scalars are stored as one-element arrays.
class ParamMap {
 public:
  ParamMap() = default;
  ParamMap(std::initializer_list<std::pair<const std::string, double>> scalars) {
    for (const auto& [k, v] : scalars) values_[k] = {v};
  }

  void set(const std::string& key, double v) { values_[key] = {v}; }
  void set(const std::string& key, std::vector<double> v) { values_[key] = std::move(v); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double scalar(const std::string& key) const;
  double scalar_or(const std::string& key, double fallback) const;
  const std::vector<double>& array(const std::string& key) const;

  const std::map<std::string, std::vector<double>>& items() const { return values_; }

 private:
  std::map<std::string, std::vector<double>> values_;
};

}  // namespace exitlab
