#include "dtipa/synth.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace dtipa {

namespace {

constexpr std::size_t kRows = 107;

constexpr std::array<const char*, 18> kAttributeNames = {
    "station_accessibility",   // 0
    "signage",                 // 1
    "ticketing",               // 2
    "gate_waiting",            // 3
    "route_map_info",          // 4
    "escalators",              // 5
    "station_crowding",        // 6
    "train_arrival_info",      // 7
    "waiting_time",            // 8
    "car_crowding",            // 9
    "noise",                   // 10
    "lighting",                // 11
    "temperature_ventilation", // 12
    "cleanliness",             // 13
    "staff_service",           // 14
    "safety",                  // 15
    "operating_hours",         // 16
    "overall",                 // 17
};

std::vector<std::size_t> range(std::size_t first, std::size_t last) {
    std::vector<std::size_t> out(last - first);
    std::iota(out.begin(), out.end(), first);
    return out;
}

// Smallest-spread multiset of n scores in [1, 5] with the given sum: start at
// 4 everywhere and shift units round-robin.
std::vector<int> level_multiset(std::size_t n, long sum) {
    if (n == 0 || sum < static_cast<long>(n) || sum > 5 * static_cast<long>(n)) {
        throw std::logic_error("synth: unreachable score sum");
    }
    std::vector<int> out(n, 4);
    long current = 4 * static_cast<long>(n);
    std::size_t i = 0;
    while (current < sum) {
        if (out[i] < 5) {
            ++out[i];
            ++current;
        }
        i = (i + 1) % n;
    }
    i = 0;
    while (current > sum) {
        if (out[i] > 1) {
            --out[i];
            --current;
        }
        i = (i + 1) % n;
    }
    return out;
}

// Deals the multiset across the subset so that every overall-score cell
// receives a proportional share of each score level: rows are keyed by their
// fractional position inside their cell and high scores go to low keys. The
// assignment depends only on class cell sizes and row order, never on which
// class a specific row carries, so no column can separate classes inside a
// group beyond one-row quantization.
void assign_striped(SurveyMatrix& m, std::size_t col, const std::vector<std::size_t>& rows,
                    long sum) {
    std::vector<int> scores = level_multiset(rows.size(), sum);
    std::sort(scores.begin(), scores.end(), std::greater<int>());

    struct Slot {
        double position;
        int cls;
        std::size_t row;
    };
    std::vector<std::pair<int, std::vector<std::size_t>>> cells; // class -> rows, ascending class
    for (std::size_t r : rows) {
        const int cls = m.overall_score(r);
        auto it = std::find_if(cells.begin(), cells.end(),
                               [&](const auto& c) { return c.first == cls; });
        if (it == cells.end()) {
            cells.push_back({cls, {r}});
        } else {
            it->second.push_back(r);
        }
    }
    std::sort(cells.begin(), cells.end());

    std::vector<Slot> slots;
    slots.reserve(rows.size());
    for (const auto& [cls, members] : cells) {
        const double n = static_cast<double>(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
            slots.push_back({(static_cast<double>(k) + 0.5) / n, cls, members[k]});
        }
    }
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        return std::tie(a.position, a.cls, a.row) < std::tie(b.position, b.cls, b.row);
    });
    for (std::size_t i = 0; i < slots.size(); ++i) m.score(slots[i].row, col) = scores[i];
}

} // namespace

SurveyMatrix synth_survey() {
    SurveyMatrix m;
    m.attribute_names.assign(kAttributeNames.begin(), kAttributeNames.end());
    m.overall_index = 17;
    m.scale_min = 1;
    m.scale_max = 5;
    m.cells.assign(kRows * m.cols(), 0);

    // Leaf groups of the intended tree.
    const auto g1 = range(0, 8);    // ticketing low, arrival info low  -> mostly 3
    const auto g2 = range(8, 64);   // ticketing low, arrival info high -> mostly 4
    const auto g3 = range(64, 66);  // ticketing 5, safety 4, accessibility 4 -> 3
    const auto g4 = range(66, 68);  // ticketing 5, safety 4, accessibility 5 -> 4
    const auto g5 = range(68, 72);  // ticketing 5, safety 5, crowding low -> mostly 4
    const auto g6 = range(72, 107); // everything high -> mostly 5

    const auto concat = [](std::initializer_list<const std::vector<std::size_t>*> parts) {
        std::vector<std::size_t> out;
        for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
        return out;
    };
    const auto left = concat({&g1, &g2});
    const auto g34 = concat({&g3, &g4});
    const auto g56 = concat({&g5, &g6});
    const auto right = concat({&g34, &g56});

    // Overall class per group, minority rows spread through each block.
    for (std::size_t r : g1) m.score(r, 17) = 3;
    m.score(g1[2], 17) = 4;
    for (std::size_t r : g2) m.score(r, 17) = 4;
    for (std::size_t local : {7, 21, 35, 49}) m.score(g2[local], 17) = 3;
    for (std::size_t local : {3, 27, 51}) m.score(g2[local], 17) = 5;
    for (std::size_t r : g3) m.score(r, 17) = 3;
    for (std::size_t r : g4) m.score(r, 17) = 4;
    for (std::size_t r : g5) m.score(r, 17) = 4;
    m.score(g5[2], 17) = 3;
    for (std::size_t r : g6) m.score(r, 17) = 5;
    m.score(g6[11], 17) = 4;
    m.score(g6[23], 17) = 4;

    // Splitter columns. Per-subset sums are pinned so the attribute means
    // land where the plan arithmetic needs them: ticketing 451/107,
    // safety 481/107, car_crowding 381/107.
    assign_striped(m, 2, g1, 25);
    assign_striped(m, 2, g2, 211);
    assign_striped(m, 2, right, 215); // all 5

    assign_striped(m, 7, g1, 23); // all at or below 3
    assign_striped(m, 7, g2, 258);
    assign_striped(m, 7, right, 200);

    assign_striped(m, 15, g1, 32);
    assign_striped(m, 15, g2, 238);
    assign_striped(m, 15, g34, 16);  // all 4
    assign_striped(m, 15, g56, 195); // all 5

    assign_striped(m, 0, g1, 29);
    assign_striped(m, 0, g2, 230);
    assign_striped(m, 0, g3, 8);   // all 4
    assign_striped(m, 0, g4, 10);  // all 5
    assign_striped(m, 0, g5, 16);
    assign_striped(m, 0, g6, 156);

    assign_striped(m, 9, g1, 22);
    assign_striped(m, 9, g2, 186);
    assign_striped(m, 9, g34, 16); // all 4, keeps the crowding cut at G5 only
    assign_striped(m, 9, g5, 12);  // all 3
    assign_striped(m, 9, g6, 145);

    // Background columns: one submultiset per region (G1 low, G2 middle,
    // right side high) so the items co-vary with overall satisfaction without
    // separating classes inside any group.
    const struct {
        std::size_t col;
        long g1, g2, right;
    } background[] = {
        {1, 33, 255, 210},  // signage, total 498
        {3, 30, 233, 192},  // gate_waiting, 455
        {4, 33, 259, 211},  // route_map_info, 503
        {5, 32, 253, 207},  // escalators, 492
        {6, 28, 219, 181},  // station_crowding, 428
        {8, 32, 250, 205},  // waiting_time, 487
        {10, 28, 226, 185}, // noise, 439
        {11, 30, 237, 193}, // lighting, 460
        {12, 32, 249, 205}, // temperature_ventilation, 486
        {13, 30, 239, 196}, // cleanliness, 465
        {14, 31, 248, 203}, // staff_service, 482
        {16, 34, 262, 212}, // operating_hours, 508
    };
    for (const auto& spec : background) {
        assign_striped(m, spec.col, g1, spec.g1);
        assign_striped(m, spec.col, g2, spec.g2);
        assign_striped(m, spec.col, right, spec.right);
    }

    return m;
}

std::string synth_survey_csv() { return survey_to_csv(synth_survey()); }

std::string synth_judgments_csv() {
    return "i,j,value\n"
           "ticketing,station_crowding,3\n"
           "ticketing,car_crowding,9\n"
           "station_crowding,car_crowding,3\n";
}

} // namespace dtipa
