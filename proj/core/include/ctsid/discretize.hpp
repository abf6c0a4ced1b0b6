#pragma once

#include "ctsid/linear_system.hpp"
#include "ctsid/transfer_function.hpp"

namespace ctsid {

struct C2dInfo {
    // Two distinct continuous poles collapsed onto one discrete pole
    // (frequency folding at this sample period).  Permitted, but the mapping
    // is no longer injective.
    bool pole_aliasing = false;
};

// Zero-order-hold discretization of the state equations:
// Ad = e^{Ah}, Bd = integral_0^h e^{As} B ds, C and D unchanged.
StateSpaceModel c2d_zoh_ss(const StateSpaceModel& ct, double h);

// First-order-hold (triangle hold) discrete equivalent in causal form.
StateSpaceModel c2d_foh_ss(const StateSpaceModel& ct, double h);

// ZOH discrete equivalent of a proper continuous transfer function.
// Maps each continuous pole p to e^{ph} and preserves the DC gain.
DtTransferFunction c2d_zoh(const CtTransferFunction& g, double h, C2dInfo* info = nullptr);

}  // namespace ctsid
