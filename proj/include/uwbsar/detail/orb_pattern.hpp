#pragma once

// Generated by tools/gen_orb_pattern.py. Do not edit.

#include <array>

namespace uwbsar::detail {

/// (x1, y1, x2, y2) offsets in pixels; bit i is I(p1) < I(p2).
inline constexpr int kOrbPatternRadius = 13;
inline constexpr std::array<std::array<signed char, 4>, 256> kOrbPattern = {{
    {-1, 6, -2, -3}, {3, 2, 5, -1}, {4, 9, 11, 6}, {1, 0, 4, -11},
    {-5, 8, 2, 1}, {-3, 1, -6, 4}, {-2, 9, 9, 3}, {7, -7, 1, -7},
    {7, -6, -4, 8}, {-6, 4, 8, -4}, {4, 8, -3, 0}, {5, -2, -7, 6},
    {8, 6, 6, 4}, {4, -5, -1, -8}, {3, -7, 2, 6}, {1, -6, -1, 3},
    {3, -3, 2, -1}, {-3, 9, 5, 3}, {12, 4, -4, 4}, {7, 9, 9, 7},
    {2, 11, -2, 4}, {-8, 4, -4, -7}, {-6, -2, 9, 8}, {-6, -8, -4, 3},
    {-7, 1, -3, 4}, {-3, 0, -1, -6}, {-1, 12, -4, 2}, {-11, 3, -7, -4},
    {4, -3, -1, -4}, {-9, 8, 3, 4}, {-2, -8, -1, 3}, {-11, -5, -7, 1},
    {-4, 6, -4, -1}, {9, -2, -1, 3}, {3, 1, 0, -4}, {-2, -3, -1, -5},
    {7, 3, 2, -8}, {-3, -7, -6, 8}, {-3, -4, -8, -1}, {8, 4, 7, -3},
    {3, 6, -2, 5}, {7, 9, 3, -7}, {3, -9, 7, 1}, {-7, 1, 4, -3},
    {6, -5, -10, -4}, {3, -10, -9, 7}, {4, 8, 7, -1}, {0, -6, -1, -1},
    {-1, -2, -5, -8}, {4, -2, -2, 0}, {-3, -1, 1, -8}, {4, -5, -8, -8},
    {-4, 2, -10, 6}, {1, 10, -4, 5}, {-8, 1, -1, -5}, {-3, -10, 5, 5},
    {10, 6, 0, -6}, {6, 9, -5, 6}, {-4, 2, -3, 1}, {2, 5, -5, -8},
    {0, -2, -1, -3}, {2, -7, 5, -2}, {8, 0, -8, -5}, {-3, -3, -2, -3},
    {-7, 7, 5, -1}, {-2, -5, 2, -4}, {-6, -8, -7, -10}, {5, 11, -5, -5},
    {5, 1, 9, 7}, {8, 3, 7, -1}, {-5, -6, -5, 5}, {0, 3, -1, 1},
    {0, -7, 5, 10}, {4, -1, 5, 4}, {-2, 5, 0, -1}, {-1, -5, 6, -2},
    {6, -1, 7, 6}, {-1, -10, -5, -6}, {10, -2, -7, -10}, {1, 2, 4, 3},
    {6, -5, 1, 9}, {-8, -1, 4, -4}, {3, 4, -1, -3}, {4, -1, 2, 1},
    {4, -7, 1, 3}, {4, -8, -3, 4}, {-6, -8, -4, 6}, {9, 4, -2, 0},
    {-7, -7, 3, -1}, {-6, -1, -4, 10}, {-1, 7, 7, 1}, {8, 3, 1, -5},
    {6, -3, -11, -3}, {1, -4, -4, 5}, {3, 3, 10, -7}, {0, 6, 5, 5},
    {6, -4, -8, 0}, {10, 1, 6, 10}, {2, 3, 2, 9}, {4, 1, -4, 7},
    {-4, 3, 0, -9}, {-1, 5, 12, 0}, {1, 3, 2, 9}, {1, 9, -3, -4},
    {-3, 2, -3, -6}, {9, 1, -1, 0}, {3, -7, -3, 1}, {7, -10, 4, 3},
    {-11, 3, 12, 3}, {6, 2, -2, 12}, {-7, -9, 11, -5}, {-4, 12, 6, -6},
    {2, 4, -6, -10}, {-2, -7, 0, 0}, {-2, 4, 1, 1}, {-9, -5, -5, 3},
    {-6, -4, 6, 5}, {-9, 5, 2, 3}, {-8, -4, 1, 3}, {-2, -4, 6, 5},
    {-1, -5, 7, 0}, {-3, 5, -5, 4}, {-1, 3, 3, 4}, {-3, 3, -4, -10},
    {8, 4, 2, 3}, {8, 4, 9, 9}, {-6, 9, 1, -3}, {5, -9, 3, 8},
    {8, 3, -4, 4}, {8, -1, 8, -8}, {0, -7, 1, 0}, {-6, -6, 1, 2},
    {4, 5, 2, -2}, {7, 4, -5, 5}, {5, -1, 1, 6}, {0, 2, -2, 3},
    {6, -4, 10, -7}, {-2, -8, 1, 4}, {-1, -6, -9, -3}, {-8, 8, -9, -3},
    {-3, 12, 7, -3}, {1, 2, -7, 2}, {7, 7, 2, 0}, {4, 5, -13, 0},
    {-8, 4, -3, 9}, {7, -3, 1, 0}, {-3, -4, -7, -2}, {4, -8, 2, -7},
    {10, 8, 5, -4}, {-5, 0, 8, 2}, {-9, 0, -4, -1}, {2, 6, -2, -5},
    {4, -2, 1, -3}, {5, 0, -5, -3}, {-1, 2, 4, -3}, {-2, 6, 3, 0},
    {-4, 4, -2, 11}, {-1, 0, 2, 0}, {0, 2, 9, -2}, {-2, -6, 6, 7},
    {-3, -6, 2, -1}, {-12, -4, 5, 2}, {-6, 0, 2, 0}, {-1, 1, 10, 3},
    {4, 4, 0, 1}, {-4, 6, -4, 1}, {-8, -3, 0, 9}, {-1, 9, -3, 2},
    {5, 4, 8, -1}, {0, 4, -3, 6}, {-7, -2, 6, 1}, {-6, 4, 4, -3},
    {0, 8, 8, -9}, {-6, 6, 6, 0}, {6, -5, 3, -3}, {1, -3, -1, 0},
    {-1, -4, -6, -8}, {0, 1, 3, -2}, {1, -7, -1, 7}, {-3, -2, -8, 2},
    {-3, -4, -4, -2}, {2, 2, 2, -3}, {-4, 1, 2, -1}, {6, -1, -5, 0},
    {-3, 9, -4, 12}, {1, 5, -2, -1}, {0, 0, -5, 2}, {6, 8, 9, 2},
    {10, 1, -4, 4}, {5, -1, 7, -7}, {5, 6, 2, -8}, {1, -8, -5, -2},
    {-6, 6, -2, 11}, {-4, 11, -5, -3}, {0, -9, -10, -6}, {-5, 3, 5, 6},
    {-5, -7, 2, 4}, {-5, 9, 4, -7}, {-9, 0, 2, 0}, {-3, -5, -8, 5},
    {-1, -7, -3, 7}, {1, 5, 3, -4}, {-1, -3, 5, -7}, {-3, 4, 5, 2},
    {-11, -1, -2, -1}, {1, -5, 10, 6}, {-13, 0, -9, 3}, {-5, 8, 2, -5},
    {3, 4, 1, -3}, {9, 8, -12, 2}, {12, -4, 6, 2}, {-3, 0, 7, 4},
    {-4, 3, -9, 4}, {1, 4, -4, -2}, {8, 6, 0, -7}, {4, -4, -2, -6},
    {-2, 0, 0, 7}, {-4, 2, 2, -1}, {-9, 1, 2, -4}, {-5, 12, 5, 3},
    {2, 1, -4, -2}, {-1, -5, -5, 2}, {-3, 1, -8, 6}, {-3, 5, 9, 7},
    {1, -9, -2, 12}, {0, 6, 6, -3}, {0, -8, -1, -12}, {-4, -3, 5, 9},
    {0, 8, -7, 3}, {-5, 10, -1, -11}, {4, 7, 0, -7}, {11, 3, -1, 2},
    {-1, -1, 1, 2}, {-4, 1, -9, -1}, {3, 7, 4, -4}, {12, 4, -4, -10},
    {1, 4, -1, -4}, {-6, -3, -6, -2}, {-4, -3, 3, 2}, {-7, -2, -4, -1},
    {3, 3, 9, -2}, {5, -4, -7, 1}, {-2, -2, 7, -6}, {-4, -9, -12, 3},
    {-7, 1, 9, -6}, {8, -5, -3, 8}, {0, 4, -4, -2}, {-1, 1, -4, 2},
    {-2, 5, 6, -10}, {2, -5, 4, -2}, {-4, -6, 1, -3}, {-1, 8, 12, -1},
    {-5, 2, 9, 3}, {-5, 11, -12, -2}, {-1, 0, 0, 2}, {2, 6, -9, -4},
}};

}  // namespace uwbsar::detail
