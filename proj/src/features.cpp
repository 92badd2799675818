#include "uwbnlos/features.hpp"

#include <cmath>
#include <string>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

RadioConstants radio_constants_for_prf(double prf_mhz) {
  if (prf_mhz == 16.0) return {113.77, 131072.0, 16.0};
  if (prf_mhz == 64.0) return {121.74, 131072.0, 64.0};
  throw DomainError("unsupported PRF " + std::to_string(prf_mhz) + " MHz (16 or 64)");
}

double propagation_time_ns(double t_round_ns, double t_reply_ns) {
  if (!(t_reply_ns >= 0.0) || !(t_round_ns >= t_reply_ns)) {
    throw DomainError("propagation_time_ns: need t_round >= t_reply >= 0, got (" +
                      std::to_string(t_round_ns) + ", " + std::to_string(t_reply_ns) + ")");
  }
  return (t_round_ns - t_reply_ns) / 2.0;
}

double distance_m(double tau_ns) {
  if (!(tau_ns >= 0.0) || !std::isfinite(tau_ns)) {
    throw DomainError("distance_m: propagation time must be >= 0, got " + std::to_string(tau_ns));
  }
  return kSpeedOfLight * tau_ns * 1e-9;
}

double fp_level_dbm(double f1, double f2, double f3, std::uint32_t n,
                    const RadioConstants& consts) {
  if (n < 1) throw DomainError("fp_level_dbm: preamble count must be >= 1");
  const double energy = f1 * f1 + f2 * f2 + f3 * f3;
  if (!(energy > 0.0)) throw DomainError("fp_level_dbm: all first-path amplitudes are zero");
  const double nn = static_cast<double>(n);
  return 10.0 * std::log10(energy / (nn * nn)) - consts.a_constant;
}

double rx_level_dbm(double cir_power, std::uint32_t n, const RadioConstants& consts) {
  if (n < 1) throw DomainError("rx_level_dbm: preamble count must be >= 1");
  if (!(cir_power > 0.0)) {
    throw DomainError("rx_level_dbm: CIR power must be positive, got " + std::to_string(cir_power));
  }
  const double nn = static_cast<double>(n);
  return 10.0 * std::log10(cir_power * consts.cir_scale / (nn * nn)) - consts.a_constant;
}

double threshold_power_db(double rx_level_dbm, double fp_level_dbm) {
  if (!std::isfinite(rx_level_dbm) || !std::isfinite(fp_level_dbm)) {
    throw DomainError("threshold_power_db: non-finite input");
  }
  return rx_level_dbm - fp_level_dbm;
}

FeatureVector extract(const RangingRecord& record, const RadioConstants& consts) {
  try {
    FeatureVector fv;
    if (record.measured_distance_m) {
      fv.distance_m = *record.measured_distance_m;
    } else if (record.t_round_ns && record.t_reply_ns) {
      fv.distance_m = distance_m(propagation_time_ns(*record.t_round_ns, *record.t_reply_ns));
    } else {
      throw DomainError("no distance source (timestamps or measured_distance_m)");
    }
    fv.fp_level_dbm =
        fp_level_dbm(record.f1, record.f2, record.f3, record.preamble_count, consts);
    fv.rx_level_dbm = rx_level_dbm(record.cir_power, record.preamble_count, consts);
    fv.threshold_power_db = threshold_power_db(fv.rx_level_dbm, fv.fp_level_dbm);
    if (!fv.all_finite()) throw DomainError("non-finite feature");
    return fv;
  } catch (const DomainError& e) {
    throw DomainError("record_id " + std::to_string(record.record_id) + ": " + e.what());
  }
}

LabeledFeatureRow extract_row(const RangingRecord& record, const RadioConstants& consts) {
  return {record.record_id, record.label, extract(record, consts)};
}

}  // namespace uwbnlos
