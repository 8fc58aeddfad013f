#pragma once

#include <cstdint>
#include <stdexcept>

#include "tsnkit/rational.hpp"

namespace tsnkit {

/// Byte constants of the preemption machinery. All sizes are wire bytes;
/// a frame's wire footprint is 42 bytes of protocol overhead (preamble,
/// header, VLAN tag, FCS, IFG) plus max(42, payload) bytes.
inline constexpr std::int64_t kFrameOverheadBytes = 42;
inline constexpr std::int64_t kMinPayloadBytes = 42;
inline constexpr std::int64_t kMinFrameBytes = 84;
inline constexpr std::int64_t kMaxNonPreemptableFragmentBytes = 143;
inline constexpr std::int64_t kPreemptionOverheadBytes = 24;
inline constexpr std::int64_t kFragmentPayloadQuantumBytes = 60;

/// (period, jitter) event model driving the arrival bounds at a port.
struct EventModel {
    Duration period;  // > 0, microseconds
    Duration jitter;  // >= 0, microseconds

    bool operator==(const EventModel&) const = default;
};

/// Upper bound on activations within a window of length dt.
/// eta_plus(0) = 2 for period == jitter: two frames may arrive together.
inline std::int64_t eta_plus(const EventModel& m, const Duration& dt) {
    if (dt.is_negative()) throw std::domain_error("eta_plus: dt must be >= 0");
    return Rational::floor_div(dt + m.jitter, m.period) + 1;
}

/// Lower bound on activations within a window of length dt. Unused by the
/// bound computation itself; provided for completeness.
inline std::int64_t eta_minus(const EventModel& m, const Duration& dt) {
    if (dt.is_negative()) throw std::domain_error("eta_minus: dt must be >= 0");
    std::int64_t v = Rational::ceil_div(dt - m.jitter, m.period) - 1;
    return v < 0 ? 0 : v;
}

/// Earliest arrival time of the q-th activation (q >= 1) relative to the
/// start of the busy window.
inline Duration delta_minus(const EventModel& m, std::int64_t q) {
    if (q < 1) throw std::domain_error("delta_minus: q must be >= 1");
    Duration v = Rational(q - 1) * m.period - m.jitter;
    return v.is_negative() ? Duration(0) : v;
}

/// Latest arrival time of the q-th activation (q >= 1).
inline Duration delta_plus(const EventModel& m, std::int64_t q) {
    if (q < 1) throw std::domain_error("delta_plus: q must be >= 1");
    return Rational(q - 1) * m.period + m.jitter;
}

/// Wire size in bytes of a frame carrying `payload` bytes.
inline std::int64_t wire_bytes(std::int64_t payload) {
    if (payload < 0) throw std::domain_error("wire_bytes: payload must be >= 0");
    return kFrameOverheadBytes + (payload < kMinPayloadBytes ? kMinPayloadBytes : payload);
}

/// Time to put `bytes` raw bytes on a link of `rate` bits per microsecond.
inline Duration frame_time(std::int64_t bytes, const Rational& rate) {
    if (bytes < 0) throw std::domain_error("frame_time: bytes must be >= 0");
    if (!(rate > Rational(0))) throw std::domain_error("frame_time: rate must be > 0");
    return Rational(bytes * 8) / rate;
}

/// Transmission time of a frame with `payload` bytes: the C bound.
inline Duration transmission_time(std::int64_t payload, const Rational& rate) {
    return frame_time(wire_bytes(payload), rate);
}

/// Maximum number of times a frame with `payload` bytes can be preempted:
/// the first fragment consumes at least 42 payload bytes and every further
/// fragment at least 60 more.
inline std::int64_t max_fragments(std::int64_t payload) {
    if (payload < kMinPayloadBytes)
        throw std::domain_error("max_fragments: payload below minimum first-fragment payload");
    return (payload - kMinPayloadBytes) / kFragmentPayloadQuantumBytes;
}

/// Event model at the next hop: the period is preserved and the jitter grows
/// by the response-time spread at this hop.
inline EventModel propagate_event_model(const EventModel& m, const Duration& wctt_plus,
                                        const Duration& best_case) {
    if (wctt_plus < best_case) throw std::domain_error("propagate_event_model: wctt < best case");
    if (best_case.is_negative()) throw std::domain_error("propagate_event_model: best case < 0");
    return EventModel{m.period, m.jitter + (wctt_plus - best_case)};
}

}  // namespace tsnkit
