#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curveflow {

// Coarse classes used by the CLI to map failures onto exit codes.
enum class ErrorClass { Config, Numerical, Usage };

class Error : public std::runtime_error {
public:
    Error(const std::string& what, ErrorClass cls)
        : std::runtime_error(what), class_(cls) {}

    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b),
                ErrorClass::Usage) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what, ErrorClass::Usage) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("parse error at offset " + std::to_string(offset) + ": " + message,
                ErrorClass::Config),
          offset_(offset), message_(message) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t offset_;
    std::string message_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what, ErrorClass::Numerical) {}
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("unbound variable '" + name + "'", ErrorClass::Config), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NullCurve : public Error {
public:
    explicit NullCurve(std::size_t sample)
        : Error("tangent is null at sample " + std::to_string(sample), ErrorClass::Numerical),
          sample_(sample) {}

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

class MixedCausality : public Error {
public:
    explicit MixedCausality(std::size_t sample)
        : Error("tangent causal character changes at sample " + std::to_string(sample),
                ErrorClass::Numerical),
          sample_(sample) {}

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

class DegenerateCurve : public Error {
public:
    explicit DegenerateCurve(std::size_t sample)
        : Error("speed vanishes at sample " + std::to_string(sample), ErrorClass::Numerical),
          sample_(sample) {}

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

class NonGenericCurve : public Error {
public:
    NonGenericCurve(int vector_index, std::size_t sample)
        : Error("Gram-Schmidt residual w" + std::to_string(vector_index) +
                    " degenerates at sample " + std::to_string(sample),
                ErrorClass::Numerical),
          index_(vector_index), sample_(sample) {}

    int vector_index() const noexcept { return index_; }
    std::size_t sample() const noexcept { return sample_; }

private:
    int index_;
    std::size_t sample_;
};

class IncompatibleClosedFlow : public Error {
public:
    explicit IncompatibleClosedFlow(double loop_integral)
        : Error("closed-curve flow has no periodic f1: loop integral = " +
                    std::to_string(loop_integral),
                ErrorClass::Numerical),
          residual_(loop_integral) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class InsufficientStates : public Error {
public:
    InsufficientStates(std::size_t have, std::size_t need)
        : Error("trajectory has " + std::to_string(have) + " states, need " +
                    std::to_string(need),
                ErrorClass::Usage) {}
};

class NotInextensible : public Error {
public:
    explicit NotInextensible(double violation)
        : Error("flow violates the inextensibility condition (max violation " +
                    std::to_string(violation) + ")",
                ErrorClass::Numerical),
          violation_(violation) {}

    double violation() const noexcept { return violation_; }

private:
    double violation_;
};

class NullCurveDeveloped : public Error {
public:
    explicit NullCurveDeveloped(double t)
        : Error("curve developed a null tangent at t = " + std::to_string(t),
                ErrorClass::Numerical),
          time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class StabilityError : public Error {
public:
    StabilityError(double t, const std::string& what)
        : Error("integration unstable at t = " + std::to_string(t) + ": " + what,
                ErrorClass::Numerical),
          time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, ErrorClass::Config) {}
};

} // namespace curveflow
