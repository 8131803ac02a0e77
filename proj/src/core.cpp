#include "tierlab/core.hpp"

#include <cmath>

namespace tierlab {

int bin_index(double counter_value) {
    if (!(counter_value >= 1.0))  // also catches NaN
        return 0;
    // ilogb extracts floor(log2(v)) exactly, no rounding slop at powers of two.
    int b = std::ilogb(counter_value);
    if (b < 0) b = 0;
    if (b >= kBinCount) b = kBinCount - 1;
    return b;
}

PageId MachineState::add_page() {
    PageId id = static_cast<PageId>(pages.size());
    Page pg;
    pg.id = id;
    if (!fast.full()) {
        pg.tier = TierKind::Fast;
        ++fast.resident_pages;
    } else {
        pg.tier = TierKind::Capacity;
        ++capacity.resident_pages;
    }
    pages.push_back(pg);
    return id;
}

Page& MachineState::page(PageId id) {
    if (id >= pages.size())
        throw InvariantError("page id " + std::to_string(id) + " out of range");
    return pages[id];
}

const Page& MachineState::page(PageId id) const {
    if (id >= pages.size())
        throw InvariantError("page id " + std::to_string(id) + " out of range");
    return pages[id];
}

void HotnessHistogram::add_page(int bin) {
    if (bin < 0 || bin >= kBinCount)
        throw InvariantError("histogram add: bin " + std::to_string(bin) + " out of range");
    ++bins[bin];
}

void HotnessHistogram::remove_page(int bin) {
    if (bin < 0 || bin >= kBinCount)
        throw InvariantError("histogram remove: bin " + std::to_string(bin) + " out of range");
    if (bins[bin] == 0)
        throw InvariantError("histogram remove: bin " + std::to_string(bin) + " underflow");
    --bins[bin];
}

void HotnessHistogram::move(int old_bin, int new_bin) {
    if (old_bin == new_bin) return;
    if (old_bin < 0 || old_bin >= kBinCount || new_bin < 0 || new_bin >= kBinCount)
        throw InvariantError("histogram move: bin out of range (" + std::to_string(old_bin) +
                             " -> " + std::to_string(new_bin) + ")");
    if (bins[old_bin] == 0)
        throw InvariantError("histogram move: bin " + std::to_string(old_bin) +
                             " underflow; page state and histogram disagree");
    --bins[old_bin];
    ++bins[new_bin];
}

}  // namespace tierlab
