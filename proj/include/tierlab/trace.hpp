#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tierlab/core.hpp"

namespace tierlab {

enum class EventKind : std::uint8_t { Alloc, Free, Access };

// One trace record. The union-ish `arg` field holds the allocation size for
// Alloc and the intra-object byte offset for Access; Free ignores it.
// Allocation contexts live in the trace's shared frame pool.
struct TraceEvent {
    EventKind kind = EventKind::Access;
    ObjectId id = 0;
    std::uint64_t arg = 0;
    std::uint32_t ctx_off = 0;
    std::uint32_t ctx_len = 0;
};

// Immutable once built. Event order is the trace's logical order; the event
// index doubles as the sequence number for sampling decisions.
struct Trace {
    std::uint64_t page_size = 4096;
    std::vector<TraceEvent> events;
    std::vector<std::uint64_t> frame_pool;

    std::span<const std::uint64_t> frames_of(const TraceEvent& e) const {
        return {frame_pool.data() + e.ctx_off, e.ctx_len};
    }

    void push_alloc(ObjectId id, std::uint64_t size, std::span<const std::uint64_t> frames);
    void push_free(ObjectId id) { events.push_back({EventKind::Free, id, 0, 0, 0}); }
    void push_access(ObjectId id, std::uint64_t offset) {
        events.push_back({EventKind::Access, id, offset, 0, 0});
    }

    std::uint64_t access_count() const;
};

// Semantic equality: page size, event sequence, and resolved frame lists.
// Frame pool layout is an encoding detail and does not participate.
bool trace_equal(const Trace& a, const Trace& b);

// Text format, one record per line after the header:
//   #tierlab-trace v1 page_size=<bytes>
//   A <id> <size> <f0,f1,...>
//   F <id>
//   X <id> <offset>
void write_trace_text(const Trace& t, const std::string& path);
Trace read_trace_text(const std::string& path);

// Binary variant: magic "TLT1", then little-endian fixed-width fields.
void write_trace_binary(const Trace& t, const std::string& path);
Trace read_trace_binary(const std::string& path);

// Dispatches on the file's leading bytes.
Trace read_trace(const std::string& path);

}  // namespace tierlab
