#pragma once

namespace bzconv {

/// Hartree to electron-volt. Every eV value in inputs and outputs goes through this.
inline constexpr double kHartreeInEv = 27.211386;

inline constexpr double ev_to_hartree(double ev) { return ev / kHartreeInEv; }
inline constexpr double hartree_to_ev(double ha) { return ha * kHartreeInEv; }

}  // namespace bzconv
