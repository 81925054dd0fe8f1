#include "loco/dsp.hpp"

#include "loco/error.hpp"

#include <cmath>
#include <stdexcept>

namespace loco::dsp {

BiquadCoefficients design_butterworth_lowpass(double cutoff_hz, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw ConfigError("sample rate must be positive");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0))
        throw ConfigError("cutoff must lie strictly between 0 and the Nyquist frequency");

    const double k = std::tan(M_PI * cutoff_hz / sample_rate_hz);
    const double q = 1.0 / std::sqrt(2.0);
    const double k2 = k * k;
    const double norm = 1.0 / (1.0 + k / q + k2);

    BiquadCoefficients c;
    c.b0 = k2 * norm;
    c.b1 = 2.0 * c.b0;
    c.b2 = c.b0;
    c.a1 = 2.0 * (k2 - 1.0) * norm;
    c.a2 = (1.0 - k / q + k2) * norm;
    return c;
}

FilterStep filter_apply(const BiquadCoefficients& c, const BiquadState& s, double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite filter input");
    const double y = c.b0 * x + c.b1 * s.x1 + c.b2 * s.x2 - c.a1 * s.y1 - c.a2 * s.y2;
    return {y, BiquadState{x, s.x1, y, s.y1}};
}

std::vector<PeakEvent> detect_peaks(std::span<const Sample> v, const PeakDetectorParams& p) {
    std::vector<PeakEvent> peaks;
    const std::size_t n = v.size();
    if (n < 2) return peaks;

    std::size_t i = 0;
    while (i < n) {
        if (v[i].value < p.threshold) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < n && v[i].value >= p.threshold) ++i;
        const std::size_t end = i - 1;

        std::size_t lo = start;
        while (lo > 0 && v[lo - 1].value < v[lo].value && v[lo - 1].value > p.floor) --lo;
        std::size_t hi = end;
        while (hi + 1 < n && v[hi + 1].value < v[hi].value && v[hi + 1].value > p.floor) ++hi;

        std::size_t best = lo;
        for (std::size_t k = lo + 1; k <= hi; ++k)
            if (v[k].value > v[best].value) best = k;
        if (best == 0 || best == n - 1) continue;

        PeakEvent ev{v[best].t, v[best].value, v[lo].t, v[hi].t};
        if (!peaks.empty() && ev.timestamp - peaks.back().timestamp < p.refractory_s) {
            if (ev.value > peaks.back().value) peaks.back() = ev;
            continue;
        }
        peaks.push_back(ev);
    }
    return peaks;
}

std::vector<PeakEvent> detect_peaks(const RingBuffer<Sample>& buffer, const PeakDetectorParams& params) {
    std::vector<Sample> linear;
    buffer.linearize(linear);
    return detect_peaks(std::span<const Sample>(linear), params);
}

} // namespace loco::dsp
