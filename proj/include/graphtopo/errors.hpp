#pragma once
#include <stdexcept>
#include <string>

namespace graphtopo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define GRAPHTOPO_DEFINE_ERROR(name)              \
    class name : public Error                     \
    {                                             \
    public:                                       \
        using Error::Error;                       \
    }

// Input validation.
GRAPHTOPO_DEFINE_ERROR(ParamError);
GRAPHTOPO_DEFINE_ERROR(ShapeError);
GRAPHTOPO_DEFINE_ERROR(InvalidInput);
GRAPHTOPO_DEFINE_ERROR(EmptyInput);
GRAPHTOPO_DEFINE_ERROR(DirectedGraphError);
GRAPHTOPO_DEFINE_ERROR(InsufficientSamples);

// Statistics.
GRAPHTOPO_DEFINE_ERROR(DegenerateVariance);
GRAPHTOPO_DEFINE_ERROR(SaturatedCorrelation);
GRAPHTOPO_DEFINE_ERROR(InvalidPrecision);
GRAPHTOPO_DEFINE_ERROR(DegenerateInput);

// Solvers.
GRAPHTOPO_DEFINE_ERROR(DomainError);
GRAPHTOPO_DEFINE_ERROR(KernelError);
GRAPHTOPO_DEFINE_ERROR(AmbiguityError);
GRAPHTOPO_DEFINE_ERROR(AnchorError);
GRAPHTOPO_DEFINE_ERROR(EmptySlot);
GRAPHTOPO_DEFINE_ERROR(ZeroSignal);

#undef GRAPHTOPO_DEFINE_ERROR

} // namespace graphtopo
