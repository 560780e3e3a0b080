#include "choimarg/kernels.hpp"

#define CHOIMARG_DENSE_NS scalar
#include "dense_impl.hpp"
