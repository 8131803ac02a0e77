#include "tierlab/trace.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tierlab {

namespace {

constexpr std::array<char, 4> kBinaryMagic{'T', 'L', 'T', '1'};

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& why) {
    throw InputError(path + ":" + std::to_string(line) + ": " + why);
}

std::uint64_t parse_u64(std::string_view s, const std::string& path, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        parse_fail(path, line, "expected unsigned integer, got '" + std::string(s) + "'");
    return v;
}

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

bool get_bytes(std::istream& in, void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!get_bytes(in, b, 8)) throw InputError(path + ": truncated binary trace");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!get_bytes(in, b, 4)) throw InputError(path + ": truncated binary trace");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void Trace::push_alloc(ObjectId id, std::uint64_t size, std::span<const std::uint64_t> frames) {
    TraceEvent e;
    e.kind = EventKind::Alloc;
    e.id = id;
    e.arg = size;
    e.ctx_off = static_cast<std::uint32_t>(frame_pool.size());
    e.ctx_len = static_cast<std::uint32_t>(frames.size());
    frame_pool.insert(frame_pool.end(), frames.begin(), frames.end());
    events.push_back(e);
}

std::uint64_t Trace::access_count() const {
    std::uint64_t n = 0;
    for (const auto& e : events) n += e.kind == EventKind::Access;
    return n;
}

bool trace_equal(const Trace& a, const Trace& b) {
    if (a.page_size != b.page_size || a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& ea = a.events[i];
        const auto& eb = b.events[i];
        if (ea.kind != eb.kind || ea.id != eb.id || ea.arg != eb.arg) return false;
        if (ea.kind == EventKind::Alloc) {
            auto fa = a.frames_of(ea);
            auto fb = b.frames_of(eb);
            if (!std::equal(fa.begin(), fa.end(), fb.begin(), fb.end())) return false;
        }
    }
    return true;
}

void write_trace_text(const Trace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "#tierlab-trace v1 page_size=" << t.page_size << "\n";
    for (const auto& e : t.events) {
        switch (e.kind) {
            case EventKind::Alloc: {
                out << "A " << e.id << " " << e.arg << " ";
                auto frames = t.frames_of(e);
                for (std::size_t i = 0; i < frames.size(); ++i) {
                    if (i) out << ",";
                    out << frames[i];
                }
                out << "\n";
                break;
            }
            case EventKind::Free:
                out << "F " << e.id << "\n";
                break;
            case EventKind::Access:
                out << "X " << e.id << " " << e.arg << "\n";
                break;
        }
    }
    if (!out) throw InputError("write failed: " + path);
}

Trace read_trace_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    Trace t;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw InputError(path + ": empty file, missing header");
    ++lineno;
    constexpr std::string_view prefix = "#tierlab-trace v1 page_size=";
    if (line.rfind(prefix, 0) != 0) parse_fail(path, lineno, "bad header");
    t.page_size = parse_u64(std::string_view(line).substr(prefix.size()), path, lineno);
    if (t.page_size == 0) parse_fail(path, lineno, "page_size must be positive");

    std::vector<std::uint64_t> frames;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind, a, b;
        ls >> kind >> a >> b;
        if (kind == "A") {
            if (a.empty() || b.empty()) parse_fail(path, lineno, "alloc needs id and size");
            std::string ctx;
            ls >> ctx;
            frames.clear();
            for (std::size_t pos = 0; pos < ctx.size();) {
                std::size_t comma = ctx.find(',', pos);
                if (comma == std::string::npos) comma = ctx.size();
                frames.push_back(
                    parse_u64(std::string_view(ctx).substr(pos, comma - pos), path, lineno));
                pos = comma + 1;
            }
            if (frames.empty()) parse_fail(path, lineno, "alloc context must be non-empty");
            t.push_alloc(parse_u64(a, path, lineno), parse_u64(b, path, lineno), frames);
        } else if (kind == "F") {
            if (a.empty()) parse_fail(path, lineno, "free needs id");
            t.push_free(parse_u64(a, path, lineno));
        } else if (kind == "X") {
            if (a.empty() || b.empty()) parse_fail(path, lineno, "access needs id and offset");
            t.push_access(parse_u64(a, path, lineno), parse_u64(b, path, lineno));
        } else {
            parse_fail(path, lineno, "unknown record kind '" + kind + "'");
        }
    }
    return t;
}

void write_trace_binary(const Trace& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out.write(kBinaryMagic.data(), kBinaryMagic.size());
    put_u64(out, t.page_size);
    put_u64(out, t.events.size());
    for (const auto& e : t.events) {
        put_u8(out, static_cast<std::uint8_t>(e.kind));
        put_u64(out, e.id);
        put_u64(out, e.arg);
        if (e.kind == EventKind::Alloc) {
            put_u32(out, e.ctx_len);
            auto frames = t.frames_of(e);
            for (auto f : frames) put_u64(out, f);
        }
    }
    if (!out) throw InputError("write failed: " + path);
}

Trace read_trace_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::array<char, 4> magic{};
    if (!get_bytes(in, magic.data(), 4) || magic != kBinaryMagic)
        throw InputError(path + ": bad magic, not a binary trace");
    Trace t;
    t.page_size = get_u64(in, path);
    if (t.page_size == 0) throw InputError(path + ": page_size must be positive");
    std::uint64_t n = get_u64(in, path);
    t.events.reserve(n);
    std::vector<std::uint64_t> frames;
    for (std::uint64_t i = 0; i < n; ++i) {
        unsigned char kind;
        if (!get_bytes(in, &kind, 1)) throw InputError(path + ": truncated binary trace");
        std::uint64_t id = get_u64(in, path);
        std::uint64_t arg = get_u64(in, path);
        switch (static_cast<EventKind>(kind)) {
            case EventKind::Alloc: {
                std::uint32_t len = get_u32(in, path);
                if (len == 0) throw InputError(path + ": alloc context must be non-empty");
                frames.resize(len);
                for (auto& f : frames) f = get_u64(in, path);
                t.push_alloc(id, arg, frames);
                break;
            }
            case EventKind::Free:
                t.push_free(id);
                break;
            case EventKind::Access:
                t.push_access(id, arg);
                break;
            default:
                throw InputError(path + ": unknown record kind at event " + std::to_string(i));
        }
    }
    return t;
}

Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    in.close();
    if (magic == kBinaryMagic) return read_trace_binary(path);
    return read_trace_text(path);
}

}  // namespace tierlab
