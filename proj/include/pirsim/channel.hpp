#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pirsim/rng.hpp"

namespace pirsim {

// One block-constant realization of the two broadcast links: h drives the
// legitimate receive antenna, g the eavesdropping antenna. sigma_y2 and
// sigma_w2 are the respective noise variances. Zero variance is allowed as an
// explicit noiseless test mode.
struct ChannelRealization {
    std::size_t num_servers = 0;
    std::vector<double> h;
    std::vector<double> g;
    double sigma_y2 = 0.0;
    double sigma_w2 = 0.0;
};

// Fading draw: h_k, g_k i.i.d. standard normal.
ChannelRealization draw_channel(std::size_t num_servers, double sigma_y2, double sigma_w2,
                                Rng& rng);

// Non-fading realization: all gains equal to one.
ChannelRealization unit_channel(std::size_t num_servers, double sigma_y2, double sigma_w2);

// y = sum_k gains[k] * signals[k] + noise, noise ~ N(0, sigma2 I). Empty
// signal entries count as silent servers. Signals are summed first and one
// noise vector is added, so a fixed rng gives a fixed block.
std::vector<double> transmit_mac(const std::vector<std::vector<double>>& signals,
                                 std::span<const double> gains, double sigma2, Rng& rng);

// Removes one server's own contribution from the eavesdropping observation.
std::vector<double> eavesdropper_cancel_own(std::span<const double> w,
                                            std::span<const double> own_signal, double own_gain);

// Removes a whole group's contributions (known signals and gains).
std::vector<double> eavesdropper_cancel_group(std::span<const double> w,
                                              const std::vector<std::vector<double>>& signals,
                                              std::span<const double> gains);

}  // namespace pirsim
