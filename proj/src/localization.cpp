#include "uwbnlos/localization.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "uwbnlos/error.hpp"

namespace uwbnlos {

namespace {

struct Usable {
  Eigen::Vector2d anchor;
  double distance;
  double weight;
};

std::vector<Usable> gather(std::span<const Anchor> anchors,
                           std::span<const RangeObservation> ranges) {
  std::unordered_map<std::uint32_t, const Anchor*> by_id;
  for (const auto& a : anchors) {
    if (!by_id.emplace(a.anchor_id, &a).second) {
      throw GeometryError("duplicate anchor_id " + std::to_string(a.anchor_id));
    }
  }
  std::vector<Usable> out;
  for (const auto& r : ranges) {
    if (!(r.weight > 0.0)) continue;
    if (r.weight > 1.0) {
      throw ValidationError("range weight must lie in [0, 1], got " + std::to_string(r.weight));
    }
    const auto it = by_id.find(r.anchor_id);
    if (it == by_id.end()) {
      throw InsufficientDataError("range refers to unknown anchor " + std::to_string(r.anchor_id));
    }
    if (!(r.distance_m > 0.0) || !std::isfinite(r.distance_m)) {
      throw DomainError("range to anchor " + std::to_string(r.anchor_id) +
                        " must be positive and finite");
    }
    out.push_back({it->second->position, r.distance_m, r.weight});
  }
  return out;
}

double max_triangle_area(const std::vector<Usable>& u) {
  double best = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      for (std::size_t k = j + 1; k < u.size(); ++k) {
        const Eigen::Vector2d e1 = u[j].anchor - u[i].anchor;
        const Eigen::Vector2d e2 = u[k].anchor - u[i].anchor;
        best = std::max(best, 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x()));
      }
    }
  }
  return best;
}

double cost_of(const std::vector<Usable>& u, const Eigen::Vector2d& p) {
  double c = 0.0;
  for (const auto& o : u) {
    const double r = (p - o.anchor).norm() - o.distance;
    c += o.weight * r * r;
  }
  return c;
}

// Subtracting the first range equation from the others gives a linear system
// in p: 2 (a_j - a_0)^T p = d_0^2 - d_j^2 + |a_j|^2 - |a_0|^2.
Eigen::Vector2d linearized_start(const std::vector<Usable>& u) {
  const Eigen::Index rows = static_cast<Eigen::Index>(u.size()) - 1;
  Eigen::MatrixXd a(rows, 2);
  Eigen::VectorXd b(rows);
  const auto& ref = u.front();
  for (Eigen::Index j = 0; j < rows; ++j) {
    const auto& o = u[static_cast<std::size_t>(j) + 1];
    const double w = std::sqrt(std::min(o.weight, ref.weight));
    a.row(j) = w * 2.0 * (o.anchor - ref.anchor).transpose();
    b(j) = w * (ref.distance * ref.distance - o.distance * o.distance +
                o.anchor.squaredNorm() - ref.anchor.squaredNorm());
  }
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace

double range_cost(std::span<const Anchor> anchors, std::span<const RangeObservation> ranges,
                  const Eigen::Vector2d& p) {
  return cost_of(gather(anchors, ranges), p);
}

PositionEstimate trilaterate(std::span<const Anchor> anchors,
                             std::span<const RangeObservation> ranges,
                             const SolverOptions& options) {
  const auto u = gather(anchors, ranges);
  if (u.size() < 3) {
    throw InsufficientDataError("trilaterate: need at least 3 usable ranges, got " +
                                std::to_string(u.size()));
  }
  if (max_triangle_area(u) < options.collinear_area_m2) {
    throw GeometryError("trilaterate: usable anchors are collinear");
  }

  Eigen::Vector2d p = linearized_start(u);
  double cost = cost_of(u, p);
  double damping = 1e-9;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (const auto& o : u) {
      const Eigen::Vector2d diff = p - o.anchor;
      const double norm = diff.norm();
      if (norm < 1e-12) continue;  // gradient of |p - a| undefined at the anchor
      const Eigen::Vector2d dir = diff / norm;
      const double r = norm - o.distance;
      h.noalias() += o.weight * dir * dir.transpose();
      g.noalias() += o.weight * r * dir;
    }
    if (g.norm() <= options.gradient_tolerance) break;

    bool accepted = false;
    while (!accepted && damping < 1e12) {
      Eigen::Matrix2d lhs = h;
      lhs.diagonal().array() += damping * (1.0 + h.diagonal().array());
      const Eigen::Vector2d step = lhs.ldlt().solve(-g);
      const Eigen::Vector2d candidate = p + step;
      const double c = cost_of(u, candidate);
      if (c <= cost) {
        accepted = true;
        const bool stalled = (candidate - p).norm() == 0.0;
        p = candidate;
        cost = c;
        damping = std::max(damping / 10.0, 1e-12);
        if (stalled) it = options.max_iterations;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) break;
  }

  PositionEstimate est;
  est.position = p;
  double wsum = 0.0;
  for (const auto& o : u) wsum += o.weight;
  est.residual_rms_m = std::sqrt(cost / wsum);
  est.used_anchor_count = static_cast<int>(u.size());
  est.iterations = std::min(it, options.max_iterations);
  return est;
}

ClassifiedFix locate_with_classifier(const ClassifierModel& model,
                                     std::span<const Anchor> anchors,
                                     std::span<const RangingRecord> records,
                                     const RadioConstants& consts,
                                     const SolverOptions& options) {
  if (records.size() < 3) {
    throw InsufficientDataError("locate: need ranges from at least 3 anchors, got " +
                                std::to_string(records.size()));
  }
  ClassifiedFix fix;
  std::size_t los = 0;
  for (const auto& rec : records) {
    const FeatureVector fv = extract(rec, consts);
    const Label decision = classify(model, fv);
    fix.decisions.push_back(decision);
    if (decision == Label::LoS) ++los;
    fix.ranges.push_back({rec.anchor_id, fv.distance_m, decision == Label::LoS ? 1.0 : 0.0});
  }
  if (los < 3) {
    for (std::size_t i = 0; i < fix.ranges.size(); ++i) {
      if (fix.decisions[i] == Label::NLoS) fix.ranges[i].weight = kDegradedNlosWeight;
    }
  }
  fix.estimate = trilaterate(anchors, fix.ranges, options);
  fix.estimate.degraded = los < 3;
  return fix;
}

std::vector<Anchor> read_anchors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open anchor file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("anchor file: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "anchor_id,x_m,y_m") {
    throw SchemaError("anchor file: header must be 'anchor_id,x_m,y_m', got '" + line + "'");
  }
  std::vector<Anchor> anchors;
  std::unordered_set<std::uint32_t> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw SchemaError("anchor file line " + std::to_string(line_no) + ": expected 3 fields");
    }
    Anchor a;
    const char* begin = line.data();
    const auto fail = [&] {
      throw ParseError("anchor file line " + std::to_string(line_no) + ": bad number");
    };
    if (auto r = std::from_chars(begin, begin + c1, a.anchor_id); r.ec != std::errc() ||
                                                                 r.ptr != begin + c1) {
      fail();
    }
    double x = 0.0;
    double y = 0.0;
    if (auto r = std::from_chars(begin + c1 + 1, begin + c2, x); r.ec != std::errc() ||
                                                                r.ptr != begin + c2) {
      fail();
    }
    if (auto r = std::from_chars(begin + c2 + 1, begin + line.size(), y);
        r.ec != std::errc() || r.ptr != begin + line.size()) {
      fail();
    }
    a.position = {x, y};
    if (!ids.insert(a.anchor_id).second) {
      throw ValidationError("anchor file: duplicate anchor_id " + std::to_string(a.anchor_id));
    }
    anchors.push_back(a);
  }
  return anchors;
}

void write_anchors(std::span<const Anchor> anchors, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "anchor_id,x_m,y_m\n";
  char buf[96];
  for (const auto& a : anchors) {
    std::snprintf(buf, sizeof(buf), "%u,%.17g,%.17g\n", a.anchor_id, a.position.x(),
                  a.position.y());
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace uwbnlos
