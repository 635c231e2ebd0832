#pragma once

#include <stdexcept>
#include <string>

namespace m3s {

/// Base class for all structured errors thrown by the library. `name()` is a
/// stable machine-readable identifier; `what()` carries the human message.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define M3S_DEFINE_ERROR(ClassName)                                    \
    class ClassName : public Error {                                   \
    public:                                                            \
        explicit ClassName(const std::string& message)                 \
            : Error(#ClassName, message) {}                            \
    }

// spectra_core
M3S_DEFINE_ERROR(ConstantSequence);
M3S_DEFINE_ERROR(NonFinite);
M3S_DEFINE_ERROR(InvalidGroups);
M3S_DEFINE_ERROR(ParseError);
M3S_DEFINE_ERROR(SchemaError);
M3S_DEFINE_ERROR(EmptySplit);
M3S_DEFINE_ERROR(InvalidConfig);

// gaf_encoder
M3S_DEFINE_ERROR(DomainError);

// nn_engine / m3s_model
M3S_DEFINE_ERROR(ShapeError);
M3S_DEFINE_ERROR(UnlabeledSample);
M3S_DEFINE_ERROR(DivergedLoss);

// metrics
M3S_DEFINE_ERROR(LengthMismatch);
M3S_DEFINE_ERROR(EmptyMatrix);

// serialization
M3S_DEFINE_ERROR(CheckpointError);

#undef M3S_DEFINE_ERROR

}  // namespace m3s
