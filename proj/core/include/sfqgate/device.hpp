#pragma once

#include "sfqgate/basis.hpp"
#include "sfqgate/circuit.hpp"

namespace sfq {

struct BasisSettings {
  int levels = kDefaultLevels;
  int n_max = kDefaultNMax;
};

/// A circuit with its fixed simulation basis (built at the idle fluxes), the
/// idle Hamiltonian, and the logical frame.
struct Device {
  SpectralBasis basis;
  CMatrix h_idle;
  LogicalFrame frame;

  int levels() const { return basis.levels; }
  int dimension() const { return basis.dimension(); }
  const CircuitParams& params() const { return basis.params; }
};

Device build_device(const CircuitParams& params, const BasisSettings& settings = {},
                    const FrameSettings& frame_settings = {});

}  // namespace sfq
