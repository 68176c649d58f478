#include "swiptnoma/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swiptnoma {

double Rng::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  // Box-Muller; u1 shifted away from 0 so log stays finite.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::cnormal() {
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));  // |.|^2 ~ Exp(1), split over re/im
  return {r * std::cos(2.0 * std::numbers::pi * u2),
          r * std::sin(2.0 * std::numbers::pi * u2)};
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double path_loss(double distance_m, double exponent) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("distance must be > 0");
  return 1e-3 * std::pow(distance_m, -exponent);
}

CVec sample_rician_vector(Rng& rng, double k_factor, int n) {
  if (k_factor < 0.0) throw std::invalid_argument("Rician K must be >= 0");
  if (n < 1) throw std::invalid_argument("vector length must be >= 1");
  const double los_w = std::sqrt(k_factor / (1.0 + k_factor));
  const double nlos_w = std::sqrt(1.0 / (1.0 + k_factor));
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = los_w + nlos_w * rng.cnormal();
  return v;
}

SampledInstance sample_instance(Rng& rng, const SystemParams& params,
                                const GeometryConfig& geometry) {
  params.validate();
  const int nt = params.antenna_count_nt;

  SampledInstance out;
  double d12 = 0.0;
  do {
    out.draw.user1 = {rng.uniform(0.0, geometry.room_width_m),
                      rng.uniform(0.0, geometry.room_depth_m)};
    out.draw.user2 = {rng.uniform(0.0, geometry.room_width_m),
                      rng.uniform(0.0, geometry.room_depth_m)};
    d12 = std::hypot(out.draw.user1.x - out.draw.user2.x,
                     out.draw.user1.y - out.draw.user2.y);
  } while (d12 < 1e-6);

  const double d1 = std::hypot(out.draw.user1.x - geometry.bs_x_m,
                               out.draw.user1.y - geometry.bs_y_m);
  const double d2 = std::hypot(out.draw.user2.x - geometry.bs_x_m,
                               out.draw.user2.y - geometry.bs_y_m);
  out.d1_m = d1;
  out.d2_m = d2;
  out.d12_m = d12;

  // user 1: Rayleigh; user 2 and the inter-user link: Rician with K.
  out.draw.raw_h1_vec = sample_rician_vector(rng, 0.0, nt);
  out.draw.raw_h2_vec = sample_rician_vector(rng, params.rician_k, nt);
  out.draw.raw_g1 = sample_rician_vector(rng, params.rician_k, 1)(0);

  const double power_scale = params.transmit_power_mw() / params.noise_power_mw();
  const double amp1 = std::sqrt(power_scale * path_loss(d1, params.pathloss_exp_user1));
  const double amp2 = std::sqrt(power_scale * path_loss(d2, params.pathloss_exp_user2));
  // All three links share the sqrt(P_s)/sigma normalization; the inter-user
  // link uses exponent 2 like the stronger downlink.
  const double g_amp = std::sqrt(power_scale * path_loss(d12, 2.0));

  out.instance.h1_vec = amp1 * out.draw.raw_h1_vec;
  out.instance.h2_vec = amp2 * out.draw.raw_h2_vec;
  out.instance.g = std::norm(g_amp * out.draw.raw_g1);
  return out;
}

}  // namespace swiptnoma
