#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/textio.hpp"

namespace swarmsched::sim {

enum class EventKind : uint8_t {
    Arrive,
    SchedStart,
    SchedDone,
    TileStart,
    TileDone,
    Preempt,
    Resume,
    TaskDone,
    DeadlineMiss,
};

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Arrive:
            return "Arrive";
        case EventKind::SchedStart:
            return "SchedStart";
        case EventKind::SchedDone:
            return "SchedDone";
        case EventKind::TileStart:
            return "TileStart";
        case EventKind::TileDone:
            return "TileDone";
        case EventKind::Preempt:
            return "Preempt";
        case EventKind::Resume:
            return "Resume";
        case EventKind::TaskDone:
            return "TaskDone";
        case EventKind::DeadlineMiss:
            return "DeadlineMiss";
    }
    return "?";
}

struct TraceEvent {
    double time = 0.0;  // seconds
    EventKind kind = EventKind::Arrive;
    int task = -1;
    std::string detail;  // space-separated key=value pairs, never commas
};

// Full simulation record: the event log plus the aggregate traffic counters
// the energy model consumes.
struct Trace {
    std::vector<TraceEvent> events;
    int64_t mac_ops = 0;
    int64_t noc_bit_hops = 0;
    int64_t dram_bytes = 0;
    int64_t sram_bytes = 0;

    void append(double time, EventKind kind, int task, std::string detail) {
        if (!events.empty() && time < events.back().time - 1e-12)
            throw InvariantError("trace times must be non-decreasing");
        events.push_back(TraceEvent{time, kind, task, std::move(detail)});
    }
};

inline std::string trace_to_csv(const Trace& trace) {
    std::string out = "time,event,task,detail\n";
    for (const TraceEvent& e : trace.events) {
        out += format_real(e.time);
        out += ',';
        out += event_kind_name(e.kind);
        out += ',';
        out += format_int(e.task);
        out += ',';
        out += e.detail;
        out += '\n';
    }
    return out;
}

}  // namespace swarmsched::sim
