#include "sfqgate/device.hpp"

namespace sfq {

Device build_device(const CircuitParams& params, const BasisSettings& settings,
                    const FrameSettings& frame_settings) {
  Device d;
  d.basis = build_spectral_basis(params, params.phi_off, settings.levels, settings.n_max);
  d.h_idle = joint_hamiltonian(d.basis, params.phi_off);
  d.frame = build_logical_frame(d.h_idle, settings.levels, frame_settings);
  return d;
}

}  // namespace sfq
