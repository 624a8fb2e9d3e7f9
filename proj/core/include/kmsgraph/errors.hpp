#pragma once

#include <stdexcept>
#include <string>

namespace kmsgraph {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define KMSGRAPH_DEFINE_ERROR(Name)                                \
  struct Name : Error {                                            \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

KMSGRAPH_DEFINE_ERROR(SchemaError);
KMSGRAPH_DEFINE_ERROR(SymbolError);
KMSGRAPH_DEFINE_ERROR(MultiplicityError);
KMSGRAPH_DEFINE_ERROR(UnknownExample);
KMSGRAPH_DEFINE_ERROR(UnknownVertex);
KMSGRAPH_DEFINE_ERROR(NoLoopFound);
KMSGRAPH_DEFINE_ERROR(PrecisionExhausted);
KMSGRAPH_DEFINE_ERROR(NotMonotone);
KMSGRAPH_DEFINE_ERROR(BracketInvalid);
KMSGRAPH_DEFINE_ERROR(NotRowFinite);
KMSGRAPH_DEFINE_ERROR(NegativePotential);
KMSGRAPH_DEFINE_ERROR(Unreachable);
KMSGRAPH_DEFINE_ERROR(OutOfRegion);
KMSGRAPH_DEFINE_ERROR(NotEventuallyPeriodic);
KMSGRAPH_DEFINE_ERROR(InvalidHypothesis);
KMSGRAPH_DEFINE_ERROR(Divergent);

#undef KMSGRAPH_DEFINE_ERROR

}  // namespace kmsgraph
