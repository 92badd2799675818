#pragma once

// The four NLoS features computed from DW1000-style diagnostic registers:
//
//   distance        c * (T_round - T_reply) / 2, or the kit-reported distance
//   FP level        10 log10((F1^2 + F2^2 + F3^2) / N^2) - A        [dBm]
//   RX level        10 log10(CIR * 2^17 / N^2) - A                  [dBm]
//   threshold power RX level - FP level                             [dB]
//
// The threshold power keeps the literal RX - FP sign. For logs where the
// received level sits below the first-path level the value is negative; the
// classifier learns the distribution and does not depend on the sign.

#include <cstdint>

#include "uwbnlos/records.hpp"

namespace uwbnlos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct RadioConstants {
  double a_constant = 113.77;  // dBm, PRF 16 MHz
  double cir_scale = 131072.0;  // 2^17
  double prf_mhz = 16.0;
};

// Constant A for the two DW1000 pulse repetition frequencies.
RadioConstants radio_constants_for_prf(double prf_mhz);

double propagation_time_ns(double t_round_ns, double t_reply_ns);
double distance_m(double tau_ns);
double fp_level_dbm(double f1, double f2, double f3, std::uint32_t n,
                    const RadioConstants& consts = {});
double rx_level_dbm(double cir_power, std::uint32_t n, const RadioConstants& consts = {});
double threshold_power_db(double rx_level_dbm, double fp_level_dbm);

// Measured distance wins over timestamps when both are present.
FeatureVector extract(const RangingRecord& record, const RadioConstants& consts = {});
LabeledFeatureRow extract_row(const RangingRecord& record, const RadioConstants& consts = {});

}  // namespace uwbnlos
