#pragma once

#include <string>
#include <vector>

namespace spfh {

// Dimensions indexed by cohomological degree, with the context that
// justifies them.
struct GradedDims {
    std::vector<long long> dims;
    std::string certificate = "exact";

    long long at(int degree) const {
        return degree >= 0 && degree < int(dims.size()) ? dims[degree] : 0;
    }
    bool operator==(const GradedDims& o) const { return dims == o.dims; }
};

}  // namespace spfh
