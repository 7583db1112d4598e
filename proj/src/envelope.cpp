#include "portalgon/envelope.hpp"

namespace portalgon {

template class DynamicLowerEnvelope<ApexedCurve>;

}  // namespace portalgon
