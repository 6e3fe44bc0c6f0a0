#pragma once

#include <array>

// Embedded reference values for the three-ion benchmark (axial frequency
// nu_x = 2 pi x 1 MHz), used by --check-table2 and the regression tests.
// Data version 1.
//
// Flag: the occupation entry for the zigzag mode of the g = 0.02 block at
// 100 uK is published as 0.0193, which is inconsistent with the
// Bose-Einstein value (~9.019) implied by the neighbouring columns; it is
// kept verbatim here and reported separately by the table check.

namespace iccsim::tables {

inline constexpr int kDataVersion = 1;

struct ConversionPair {
  double dimensionless;
  double frequency_hz;
};

// (g, nu_y) pairs.
inline constexpr std::array<ConversionPair, 4> kTable1G{{
    {-0.1, 1.470e6},
    {-0.005, 1.545e6},
    {0.0, 1.549e6},
    {0.02, 1.565e6},
}};

// (Delta, nu_dip) pairs.
inline constexpr std::array<ConversionPair, 5> kTable1Delta{{
    {0.005, 110e3},
    {0.010, 155e3},
    {0.015, 190e3},
    {0.020, 219e3},
    {0.025, 245e3},
}};

inline constexpr std::array<double, 4> kTable2TemperaturesUK{5.0, 10.0, 50.0, 100.0};

struct Table2Row {
  double nu_mhz;                      // omega/2pi in MHz
  std::array<double, 4> occupations;  // at 5, 10, 50, 100 uK
};

struct Table2Block {
  double g;
  std::array<Table2Row, 6> rows;
};

inline constexpr std::array<Table2Block, 3> kTable2{{
    {0.02,
     {{{0.2191, {0.1391, 0.5371, 4.2728, 0.0193}},
       {1.0000, {0.0001, 0.0083, 0.6206, 1.6235}},
       {1.2033, {0.0000, 0.0031, 0.4600, 1.2794}},
       {1.5646, {0.0000, 0.0005, 0.2866, 0.8937}},
       {1.7321, {0.0000, 0.0002, 0.2341, 0.7715}},
       {2.4083, {0.0000, 0.0000, 0.1100, 0.4594}}}}},
    {-0.005,
     {{{0.1593, {0.2974, 0.9187, 6.3014, 13.0844}},
       {1.0000, {0.0001, 0.0083, 0.6206, 1.6235}},
       {1.1674, {0.0000, 0.0037, 0.4839, 1.3313}},
       {1.5453, {0.0000, 0.0006, 0.2935, 0.9096}},
       {1.7478, {0.0000, 0.0002, 0.2297, 0.7612}},
       {2.3922, {0.0000, 0.0000, 0.1119, 0.4646}}}}},
    {-0.1,
     {{{0.6102, {0.0029, 0.0565, 1.2559, 2.9391}},
       {0.8873, {0.0002, 0.0143, 0.7443, 1.8837}},
       {1.0000, {0.0001, 0.0083, 0.6206, 1.6235}},
       {1.4697, {0.0000, 0.0009, 0.3227, 0.9760}},
       {1.9313, {0.0000, 0.0001, 0.1857, 0.6550}},
       {2.1425, {0.0000, 0.0000, 0.1467, 0.5567}}}}},
}};

// Index of the flagged cell: block 0 (g = 0.02), row 0 (zigzag mode),
// temperature column 3 (100 uK).
inline constexpr int kFlaggedBlock = 0;
inline constexpr int kFlaggedRow = 0;
inline constexpr int kFlaggedColumn = 3;

inline constexpr double kDelta = 0.025;  // quench strength of the benchmark
inline constexpr double kNuXHz = 1.0e6;

}  // namespace iccsim::tables
