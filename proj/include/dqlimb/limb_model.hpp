// Copyright 2026 The dqlimb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Declarative description of the 7-DOF lower limb: segment geometry, mass
/// properties, range-of-motion limits and gravity, plus the joint-space
/// state types.
///
/// Config documents are JSON with three sections:
///
///   {
///     "segments": {
///       "pelvis": {"length": 0.1},
///       "thigh":  {"length": 0.44, "mass": 10.5,
///                  "com": [0.22, 0, 0],
///                  "inertia": [[ixx, ixy, ixz], [iyx, iyy, iyz], [izx, izy, izz]]},
///       "leg":    {...},
///       "foot":   {...}
///     },
///     "rom": {"hip_flexion_extension": [-30, 120], ...},   // degrees
///     "gravity": [0, 0, -9.81]
///   }
///
/// Only the segment lengths are required. A missing "com" defaults to the
/// segment midpoint along its x axis, a missing "inertia" to a solid
/// cylinder of the segment's default radius, and a missing "rom" entry to
/// the anatomical defaults in kDefaultRomDegrees.

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "dqlimb/error.hpp"
#include "dqlimb/quaternion.hpp"

namespace dqlimb {

inline constexpr double kPi = std::numbers::pi;
constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Quaternionic inertia tensor: the three rows (i_x, i_y, i_z) of the
/// 3x3 inertia matrix about the center of mass, in kg m^2.
struct InertiaOperator {
  PureQuaternion ix;
  PureQuaternion iy;
  PureQuaternion iz;

  static InertiaOperator principal(double ixx, double iyy, double izz) {
    return {{ixx, 0.0, 0.0}, {0.0, iyy, 0.0}, {0.0, 0.0, izz}};
  }
  static InertiaOperator from_matrix(const Eigen::Matrix3d& m) {
    return {PureQuaternion(Eigen::Vector3d(m.row(0).transpose())),
            PureQuaternion(Eigen::Vector3d(m.row(1).transpose())),
            PureQuaternion(Eigen::Vector3d(m.row(2).transpose()))};
  }

  /// chi(I) p = <i_x,p> i + <i_y,p> j + <i_z,p> k
  constexpr PureQuaternion apply(const PureQuaternion& p) const {
    return {quat_inner(ix, p), quat_inner(iy, p), quat_inner(iz, p)};
  }

  Eigen::Matrix3d to_matrix() const {
    Eigen::Matrix3d m;
    m.row(0) = ix.to_vector().transpose();
    m.row(1) = iy.to_vector().transpose();
    m.row(2) = iz.to_vector().transpose();
    return m;
  }
};

/// A rigid link. Lengths in m, mass in kg, com_offset in the segment frame.
struct Segment {
  std::string name;
  double length = 0.0;
  double mass = 0.0;
  Eigen::Vector3d com_offset = Eigen::Vector3d::Zero();
  InertiaOperator inertia;
};

/// Index of each range-of-motion row.
enum class RomConstraint : int {
  kHipFlexionExtension = 0,
  kHipAdductionAbduction,
  kHipMedialLateral,
  kKneeFlexionExtension,
  kAnklePlantarDorsiflexion,
  kAnklePronationExternal,
  kAnkleInversionEversion,
};
inline constexpr std::size_t kRomConstraintCount = 7;

inline constexpr std::array<std::string_view, kRomConstraintCount> kRomConstraintNames = {
    "hip_flexion_extension",    "hip_adduction_abduction", "hip_medial_lateral",
    "knee_flexion_extension",   "ankle_plantar_dorsiflexion",
    "ankle_pronation_external", "ankle_inversion_eversion"};

struct AngleRange {
  double min = 0.0;  // rad
  double max = 0.0;  // rad
  constexpr bool contains(double a) const { return a >= min && a <= max; }
};

/// Anatomical range of motion in degrees, {min, max} per row.
inline constexpr std::array<std::array<double, 2>, kRomConstraintCount> kDefaultRomDegrees = {{
    {-30.0, 120.0},
    {-20.0, 45.0},
    {-50.0, 40.0},
    {-150.0, 0.0},
    {-40.0, 20.0},
    {-35.0, 30.0},
    {-35.0, 20.0},
}};

struct RomLimits {
  std::array<AngleRange, kRomConstraintCount> ranges;

  static RomLimits defaults() {
    RomLimits rom;
    for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
      rom.ranges[i] = {deg2rad(kDefaultRomDegrees[i][0]), deg2rad(kDefaultRomDegrees[i][1])};
    }
    return rom;
  }
  const AngleRange& operator[](RomConstraint c) const { return ranges[static_cast<int>(c)]; }
  AngleRange& operator[](RomConstraint c) { return ranges[static_cast<int>(c)]; }
};

/// Joint configuration: angles (theta1, theta2, theta3) in rad and the hip
/// and ankle rotation axes. The knee axis is fixed to z.
struct JointState {
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  PureQuaternion n1 = PureQuaternion::unit_z();
  PureQuaternion n3 = PureQuaternion::unit_z();

  /// Throws NonUnitAxis / NonFiniteValue.
  void validate() const {
    if (!theta.allFinite() || !n1.is_finite() || !n3.is_finite()) {
      throw NonFiniteValue("joint state has non-finite components");
    }
    if (!n1.is_unit()) throw NonUnitAxis("hip axis n1 must have unit norm");
    if (!n3.is_unit()) throw NonUnitAxis("ankle axis n3 must have unit norm");
  }

  /// Packs (theta1..3, n1, n3) as the 9-vector used by the IK network.
  Eigen::Matrix<double, 9, 1> pack() const {
    Eigen::Matrix<double, 9, 1> v;
    v << theta, n1.x, n1.y, n1.z, n3.x, n3.y, n3.z;
    return v;
  }
  static JointState unpack(const Eigen::Matrix<double, 9, 1>& v) {
    return {v.head<3>(), {v(3), v(4), v(5)}, {v(6), v(7), v(8)}};
  }
};

inline constexpr PureQuaternion kKneeAxis = PureQuaternion::unit_z();

/// Joint angle rates (rad/s); axis rates are zero.
using JointRates = Eigen::Vector3d;
/// Joint angle accelerations (rad/s^2).
using JointAccels = Eigen::Vector3d;

struct LimbModel {
  Segment pelvis;                  // L0, massless base offset
  std::array<Segment, 3> links;    // thigh, leg, foot
  RomLimits rom = RomLimits::defaults();
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};

  const Segment& thigh() const { return links[0]; }
  const Segment& leg() const { return links[1]; }
  const Segment& foot() const { return links[2]; }

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

namespace detail {

inline constexpr std::array<std::string_view, 3> kLinkNames = {"thigh", "leg", "foot"};
// Solid-cylinder radii used when a config gives no inertia.
inline constexpr std::array<double, 3> kDefaultRadius = {0.06, 0.045, 0.03};

inline InertiaOperator cylinder_inertia(double mass, double length, double radius) {
  const double axial = 0.5 * mass * radius * radius;
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  return InertiaOperator::principal(axial, transverse, transverse);
}

inline void validate_inertia(const Segment& s) {
  const Eigen::Matrix3d m = s.inertia.to_matrix();
  const std::string field = "segments." + s.name + ".inertia";
  if (!m.allFinite()) throw ValidationError(field + ": non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw ValidationError(field + ": matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d p = eig.eigenvalues();
  if (p.minCoeff() <= 0.0) throw ValidationError(field + ": principal moments must be positive");
  const double slack = 1e-12 * p.sum();
  if (p(0) + p(1) < p(2) - slack || p(0) + p(2) < p(1) - slack || p(1) + p(2) < p(0) - slack) {
    throw ValidationError(field + ": principal moments violate the triangle inequality");
  }
}

}  // namespace detail

inline void LimbModel::validate() const {
  if (!(pelvis.length >= 0.0) || !std::isfinite(pelvis.length)) {
    throw ValidationError("segments.pelvis.length must be a finite non-negative number");
  }
  for (const Segment& s : links) {
    if (!(s.length >= 0.0) || !std::isfinite(s.length)) {
      throw ValidationError("segments." + s.name + ".length must be a finite non-negative number");
    }
    if (!(s.mass > 0.0) || !std::isfinite(s.mass)) {
      throw ValidationError("segments." + s.name + ".mass must be positive");
    }
    if (!s.com_offset.allFinite()) {
      throw ValidationError("segments." + s.name + ".com must be finite");
    }
    detail::validate_inertia(s);
  }
  for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
    const AngleRange& r = rom.ranges[i];
    if (!(r.min < r.max)) {
      throw ValidationError("rom." + std::string(kRomConstraintNames[i]) + ": min must be < max");
    }
  }
  if (!gravity.allFinite()) throw ValidationError("gravity must be finite");
}

/// Builds a model with the given lengths and default mass properties.
inline LimbModel make_limb_model(double l0, double l1, double l2, double l3,
                                 const std::array<double, 3>& masses = {10.5, 3.5, 1.2}) {
  LimbModel m;
  m.pelvis = {"pelvis", l0, 0.0, Eigen::Vector3d::Zero(), {}};
  const std::array<double, 3> lengths = {l1, l2, l3};
  for (std::size_t i = 0; i < 3; ++i) {
    Segment& s = m.links[i];
    s.name = std::string(detail::kLinkNames[i]);
    s.length = lengths[i];
    s.mass = masses[i];
    s.com_offset = Eigen::Vector3d(lengths[i] / 2.0, 0.0, 0.0);
    s.inertia = detail::cylinder_inertia(masses[i], lengths[i], detail::kDefaultRadius[i]);
  }
  return m;
}

/// Placeholder anthropometry: plausible adult proportions, not measured data.
inline LimbModel default_limb_model() { return make_limb_model(0.10, 0.44, 0.43, 0.10); }

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field + ": expected a number");
  return j.get<double>();
}

inline Eigen::Vector3d require_vec3(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ParseError(field + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = require_number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace detail

/// Parses a JSON limb config. Throws ParseError on malformed documents and
/// ValidationError on physically invalid values.
inline LimbModel load_limb_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("limb config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("limb config: top level must be an object");
  if (!doc.contains("segments") || !doc["segments"].is_object()) {
    throw ParseError("segments: missing section");
  }
  const auto& segs = doc["segments"];

  auto length_of = [&](std::string_view name) {
    const std::string key(name);
    if (!segs.contains(key) || !segs[key].contains("length")) {
      throw ParseError("segments." + key + ".length: missing");
    }
    return detail::require_number(segs[key]["length"], "segments." + key + ".length");
  };
  const double l0 = length_of("pelvis");
  std::array<double, 3> lengths{};
  for (std::size_t i = 0; i < 3; ++i) lengths[i] = length_of(detail::kLinkNames[i]);

  LimbModel model = make_limb_model(l0, lengths[0], lengths[1], lengths[2]);
  for (std::size_t i = 0; i < 3; ++i) {
    Segment& s = model.links[i];
    const auto& js = segs[s.name];
    const std::string prefix = "segments." + s.name;
    bool mass_given = false;
    if (js.contains("mass")) {
      s.mass = detail::require_number(js["mass"], prefix + ".mass");
      mass_given = true;
    }
    if (js.contains("com")) s.com_offset = detail::require_vec3(js["com"], prefix + ".com");
    if (js.contains("inertia")) {
      const auto& ji = js["inertia"];
      if (!ji.is_array() || ji.size() != 3) {
        throw ParseError(prefix + ".inertia: expected 3 rows");
      }
      Eigen::Matrix3d m;
      for (int r = 0; r < 3; ++r) {
        m.row(r) = detail::require_vec3(ji[r], prefix + ".inertia[" + std::to_string(r) + "]")
                       .transpose();
      }
      s.inertia = InertiaOperator::from_matrix(m);
    } else if (mass_given && s.mass > 0.0) {
      s.inertia = detail::cylinder_inertia(s.mass, s.length, detail::kDefaultRadius[i]);
    }
  }

  if (doc.contains("rom")) {
    const auto& jr = doc["rom"];
    if (!jr.is_object()) throw ParseError("rom: expected an object");
    for (auto it = jr.begin(); it != jr.end(); ++it) {
      std::size_t idx = kRomConstraintCount;
      for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
        if (kRomConstraintNames[i] == it.key()) idx = i;
      }
      if (idx == kRomConstraintCount) throw ParseError("rom." + it.key() + ": unknown constraint");
      const auto& pair = it.value();
      if (!pair.is_array() || pair.size() != 2) {
        throw ParseError("rom." + it.key() + ": expected [min, max] in degrees");
      }
      model.rom.ranges[idx] = {
          deg2rad(detail::require_number(pair[0], "rom." + it.key() + "[0]")),
          deg2rad(detail::require_number(pair[1], "rom." + it.key() + "[1]"))};
    }
  }
  if (doc.contains("gravity")) model.gravity = detail::require_vec3(doc["gravity"], "gravity");

  model.validate();
  return model;
}

inline LimbModel load_limb_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open limb config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_limb_config(ss.str());
}

/// Serializes a model in the same schema load_limb_config reads.
inline std::string dump_limb_config(const LimbModel& model) {
  nlohmann::json doc;
  doc["segments"]["pelvis"]["length"] = model.pelvis.length;
  for (const Segment& s : model.links) {
    auto& js = doc["segments"][s.name];
    js["length"] = s.length;
    js["mass"] = s.mass;
    js["com"] = {s.com_offset.x(), s.com_offset.y(), s.com_offset.z()};
    const Eigen::Matrix3d m = s.inertia.to_matrix();
    js["inertia"] = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) js["inertia"].push_back({m(r, 0), m(r, 1), m(r, 2)});
  }
  for (std::size_t i = 0; i < kRomConstraintCount; ++i) {
    doc["rom"][std::string(kRomConstraintNames[i])] = {rad2deg(model.rom.ranges[i].min),
                                                       rad2deg(model.rom.ranges[i].max)};
  }
  doc["gravity"] = {model.gravity.x(), model.gravity.y(), model.gravity.z()};
  return doc.dump(2) + "\n";
}

}  // namespace dqlimb
