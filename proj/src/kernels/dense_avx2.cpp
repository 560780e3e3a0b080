#include "choimarg/kernels.hpp"

// Eigen is header-only, so its templates instantiated here with AVX2 code
// would share symbol names with the portable instantiations elsewhere in
// the library. Renaming the namespace keeps the two sets apart.
#define Eigen choimarg_eigen_avx2
#define CHOIMARG_DENSE_NS avx2
#include "dense_impl.hpp"
