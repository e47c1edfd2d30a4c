#pragma once

#include <stdexcept>
#include <string>

namespace lsdp {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LSDP_DEFINE_ERROR(Name)                 \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

LSDP_DEFINE_ERROR(IOError);
LSDP_DEFINE_ERROR(FormatError);
LSDP_DEFINE_ERROR(DomainError);
LSDP_DEFINE_ERROR(DegenerateOutput);
LSDP_DEFINE_ERROR(ImageTooSmall);
LSDP_DEFINE_ERROR(OutOfBounds);
LSDP_DEFINE_ERROR(EmptyPointSet);
LSDP_DEFINE_ERROR(DegenerateSpread);
LSDP_DEFINE_ERROR(OutOfRange);
LSDP_DEFINE_ERROR(ShapeMismatch);
LSDP_DEFINE_ERROR(EmptyClass);
LSDP_DEFINE_ERROR(DimensionMismatch);
LSDP_DEFINE_ERROR(InsufficientData);

#undef LSDP_DEFINE_ERROR

}  // namespace lsdp
