#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace loco::dsp {

/// Normalized biquad, a0 == 1:
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoefficients {
    double b0 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

/// Second-order Butterworth low-pass (Q = 1/sqrt(2)) by bilinear transform
/// with the cutoff pre-warped, so the -3 dB point lands exactly on cutoff_hz.
/// Throws ConfigError unless 0 < cutoff_hz < sample_rate_hz / 2.
BiquadCoefficients design_butterworth_lowpass(double cutoff_hz, double sample_rate_hz);

/// Direct form I history.
struct BiquadState {
    double x1 = 0.0;
    double x2 = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
};

struct FilterStep {
    double value;
    BiquadState state;
};

/// One step of the recurrence. Throws std::domain_error on non-finite input.
FilterStep filter_apply(const BiquadCoefficients& c, const BiquadState& state, double sample);

class Biquad {
public:
    Biquad() = default;
    explicit Biquad(const BiquadCoefficients& c) : coeffs_(c) {}

    double process(double sample) {
        auto step = filter_apply(coeffs_, state_, sample);
        state_ = step.state;
        return step.value;
    }

    void reset() { state_ = {}; }
    const BiquadCoefficients& coefficients() const { return coeffs_; }
    const BiquadState& state() const { return state_; }

private:
    BiquadCoefficients coeffs_{};
    BiquadState state_{};
};

/// Fixed-capacity FIFO; pushing into a full buffer evicts the oldest element.
template <class T>
class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity) : data_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ring buffer capacity must be positive");
    }

    void push(const T& value) {
        data_[(head_ + size_) % data_.size()] = value;
        if (size_ < data_.size())
            ++size_;
        else
            head_ = (head_ + 1) % data_.size();
    }

    /// 0 is the oldest element.
    const T& operator[](std::size_t i) const { return data_[(head_ + i) % data_.size()]; }
    const T& newest() const { return (*this)[size_ - 1]; }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return data_.size(); }
    bool empty() const { return size_ == 0; }
    bool full() const { return size_ == data_.size(); }
    void clear() { head_ = size_ = 0; }

    /// Oldest-first copy into `out` (reuses its storage).
    void linearize(std::vector<T>& out) const {
        out.resize(size_);
        for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
    }

private:
    std::vector<T> data_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

struct Sample {
    double t = 0.0;
    double value = 0.0;
};

struct PeakEvent {
    double timestamp = 0.0;
    double value = 0.0;
    double onset = 0.0;   ///< where the outward descent from the threshold crossing stopped (rising side)
    double offset = 0.0;  ///< same, falling side
};

struct PeakDetectorParams {
    double threshold = 0.15;     ///< m/s; regions must reach this
    double floor = 0.0;          ///< m/s; the outward descent stops here
    double refractory_s = 0.15;  ///< minimum spacing between reported peaks
};

/// Peaks of a buffered velocity signal. Each contiguous run at or above the
/// threshold is widened outward while the signal keeps falling and stays above
/// the floor; the maximum of the widened run is the peak. Runs whose maximum
/// sits on the first or last sample are dropped (the crest is not inside the
/// buffer). Peaks closer than the refractory interval keep the larger one.
std::vector<PeakEvent> detect_peaks(std::span<const Sample> samples, const PeakDetectorParams& params);

std::vector<PeakEvent> detect_peaks(const RingBuffer<Sample>& buffer, const PeakDetectorParams& params);

} // namespace loco::dsp
