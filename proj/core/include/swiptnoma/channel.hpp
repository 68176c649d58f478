#pragma once

#include <cstdint>
#include <random>

#include "swiptnoma/system.hpp"

namespace swiptnoma {

/// Room geometry for random user placement. The base station sits on the
/// x = 0 edge; users are placed uniformly inside the rectangle
/// [0, room_width_m] x [0, room_depth_m].
struct GeometryConfig {
  double room_width_m = 5.0;
  double room_depth_m = 6.0;
  double bs_x_m = 0.0;
  double bs_y_m = 2.5;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// Raw fading draw before path-loss and power normalization, kept around
/// for diagnostics and tests.
struct ChannelDraw {
  CVec raw_h1_vec;
  CVec raw_h2_vec;
  std::complex<double> raw_g1;
  Position user1;
  Position user2;
};

/// Deterministic stream RNG. All distributions are derived from raw 64-bit
/// outputs with fixed arithmetic, so draws are bit-identical across
/// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller on explicit uniforms.
  double normal();
  /// Circularly-symmetric complex Gaussian, zero mean, unit variance.
  std::complex<double> cnormal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a trial counter into a master seed (splitmix64-style), so that
/// per-trial streams are reproducible independent of scheduling order.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter);

/// Distance-dependent path loss 1e-3 * d^(-exponent) as a linear power gain.
double path_loss(double distance_m, double exponent);

/// Rician fading vector sqrt(K/(1+K)) * ones + sqrt(1/(1+K)) * CN(0, I).
/// The LOS component is the all-ones unit-modulus steering convention.
CVec sample_rician_vector(Rng& rng, double k_factor, int n);

/// Draws user positions and fading, applies path loss and the
/// sqrt(P_s)/sigma power normalization, and returns the instance plus the
/// raw draw. Coincident users are re-drawn.
struct SampledInstance {
  MisoInstance instance;
  ChannelDraw draw;
  double d1_m = 0.0;
  double d2_m = 0.0;
  double d12_m = 0.0;
};

SampledInstance sample_instance(Rng& rng, const SystemParams& params,
                                const GeometryConfig& geometry = {});

}  // namespace swiptnoma
