#pragma once

namespace tofsim {

/// Planar pose + height of the simulated vehicle, body-frame velocities,
/// and the current yaw rate tracked by the steering rate limiter.
struct DroneState {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;
  double yaw = 0.0;
  double v_forward = 0.0;
  double v_vertical = 0.0;
  double yaw_rate = 0.0;
  double time_s = 0.0;
};

}  // namespace tofsim
