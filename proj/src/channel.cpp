#include "pirsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace pirsim {

ChannelRealization draw_channel(std::size_t num_servers, double sigma_y2, double sigma_w2,
                                Rng& rng) {
    if (num_servers < 2) throw std::invalid_argument("channel: need at least two servers");
    if (sigma_y2 < 0.0 || sigma_w2 < 0.0)
        throw std::invalid_argument("channel: noise variances must be nonnegative");
    ChannelRealization ch;
    ch.num_servers = num_servers;
    ch.sigma_y2 = sigma_y2;
    ch.sigma_w2 = sigma_w2;
    ch.h.resize(num_servers);
    ch.g.resize(num_servers);
    for (auto& v : ch.h) v = rng.gaussian();
    for (auto& v : ch.g) v = rng.gaussian();
    return ch;
}

ChannelRealization unit_channel(std::size_t num_servers, double sigma_y2, double sigma_w2) {
    if (num_servers < 2) throw std::invalid_argument("channel: need at least two servers");
    if (sigma_y2 < 0.0 || sigma_w2 < 0.0)
        throw std::invalid_argument("channel: noise variances must be nonnegative");
    ChannelRealization ch;
    ch.num_servers = num_servers;
    ch.sigma_y2 = sigma_y2;
    ch.sigma_w2 = sigma_w2;
    ch.h.assign(num_servers, 1.0);
    ch.g.assign(num_servers, 1.0);
    return ch;
}

std::vector<double> transmit_mac(const std::vector<std::vector<double>>& signals,
                                 std::span<const double> gains, double sigma2, Rng& rng) {
    if (signals.size() != gains.size())
        throw std::invalid_argument("mac: one gain per transmitted signal required");
    if (sigma2 < 0.0) throw std::invalid_argument("mac: noise variance must be nonnegative");
    std::size_t n = 0;
    for (const auto& s : signals)
        if (!s.empty()) {
            n = s.size();
            break;
        }
    if (n == 0) throw std::invalid_argument("mac: all signals empty");
    std::vector<double> y(n, 0.0);
    for (std::size_t k = 0; k < signals.size(); ++k) {
        if (signals[k].empty()) continue;  // silent server
        if (signals[k].size() != n) throw std::invalid_argument("mac: signal lengths differ");
        for (std::size_t j = 0; j < n; ++j) y[j] += gains[k] * signals[k][j];
    }
    const double sd = std::sqrt(sigma2);
    for (std::size_t j = 0; j < n; ++j) y[j] += sd * rng.gaussian();
    return y;
}

std::vector<double> eavesdropper_cancel_own(std::span<const double> w,
                                            std::span<const double> own_signal, double own_gain) {
    if (w.size() != own_signal.size())
        throw std::invalid_argument("cancel: signal length must match observation");
    std::vector<double> z(w.begin(), w.end());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] -= own_gain * own_signal[j];
    return z;
}

std::vector<double> eavesdropper_cancel_group(std::span<const double> w,
                                              const std::vector<std::vector<double>>& signals,
                                              std::span<const double> gains) {
    if (signals.size() != gains.size())
        throw std::invalid_argument("cancel: one gain per signal required");
    std::vector<double> z(w.begin(), w.end());
    for (std::size_t k = 0; k < signals.size(); ++k) {
        if (signals[k].empty()) continue;
        if (signals[k].size() != z.size())
            throw std::invalid_argument("cancel: signal length must match observation");
        for (std::size_t j = 0; j < z.size(); ++j) z[j] -= gains[k] * signals[k][j];
    }
    return z;
}

}  // namespace pirsim
