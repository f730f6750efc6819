#pragma once

#include <functional>

namespace sgl {

// One outer iteration of either solver. ADMM leaves grad_norm at 0.
struct TraceRecord {
    int k = 0;
    double sigma = 0.0;
    double grad_norm = 0.0;
    int inner_iters = 0;
    double eta_gap = 0.0;
    double eta_dual = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

} // namespace sgl
