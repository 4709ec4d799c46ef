#pragma once

#include <stdexcept>
#include <string>

namespace regobs {

// Scenario/configuration problems. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures during an otherwise valid run. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class QuadratureNonConvergence : public NumericalError {
public:
    explicit QuadratureNonConvergence(const std::string& msg) : NumericalError(msg) {}
};

class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

class EmptySensorSet : public std::invalid_argument {
public:
    explicit EmptySensorSet(const std::string& msg) : std::invalid_argument(msg) {}
};

class NonPositiveHorizon : public std::invalid_argument {
public:
    explicit NonPositiveHorizon(const std::string& msg) : std::invalid_argument(msg) {}
};

// A slow direction is invisible to every sensor; no output injection can move it.
class UndetectableSlowMode : public NumericalError {
public:
    explicit UndetectableSlowMode(const std::string& msg) : NumericalError(msg) {}
};

class RiccatiNonConvergence : public NumericalError {
public:
    explicit RiccatiNonConvergence(const std::string& msg) : NumericalError(msg) {}
};

// A requested estimator rate collides with a plant eigenvalue.
class SylvesterResonance : public NumericalError {
public:
    explicit SylvesterResonance(const std::string& msg) : NumericalError(msg) {}
};

// The stacked output/transform map cannot reproduce the reconstruction target.
class ReconstructionRankDeficient : public NumericalError {
public:
    explicit ReconstructionRankDeficient(const std::string& msg) : NumericalError(msg) {}
};

class StepTooCoarse : public NumericalError {
public:
    explicit StepTooCoarse(const std::string& msg) : NumericalError(msg) {}
};

class InsufficientSamples : public std::invalid_argument {
public:
    explicit InsufficientSamples(const std::string& msg) : std::invalid_argument(msg) {}
};

class NonPositiveSamples : public std::invalid_argument {
public:
    explicit NonPositiveSamples(const std::string& msg) : std::invalid_argument(msg) {}
};

class ScenarioInfeasible : public NumericalError {
public:
    explicit ScenarioInfeasible(const std::string& msg) : NumericalError(msg) {}
};

} // namespace regobs
