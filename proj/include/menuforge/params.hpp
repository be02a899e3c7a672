#pragma once
// Mechanism parameter bundle shared by the solver, measure, and mechanism
// modules. The seven qualitative structures use different subsets of the
// fields; unused fields stay unset.

#include <optional>
#include <stdexcept>
#include <string>

namespace menuforge {

enum class StructureLabel { A, B, C, D, Dp, E, Ep };

inline std::string to_string(StructureLabel s) {
  switch (s) {
    case StructureLabel::A: return "A";
    case StructureLabel::B: return "B";
    case StructureLabel::C: return "C";
    case StructureLabel::D: return "D";
    case StructureLabel::Dp: return "Dp";
    case StructureLabel::E: return "E";
    case StructureLabel::Ep: return "Ep";
  }
  throw std::logic_error("unknown structure label");
}

inline StructureLabel structure_from_string(const std::string& s) {
  if (s == "A") return StructureLabel::A;
  if (s == "B") return StructureLabel::B;
  if (s == "C") return StructureLabel::C;
  if (s == "D") return StructureLabel::D;
  if (s == "Dp") return StructureLabel::Dp;
  if (s == "E") return StructureLabel::E;
  if (s == "Ep") return StructureLabel::Ep;
  throw std::domain_error("unknown structure label: " + s);
}

struct MechanismParams {
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::optional<double> delta_star;
  std::optional<double> h;
  std::optional<double> a1;
  std::optional<double> a2;
  std::optional<double> a;
};

// The exclusion region of every structure is described by the same four
// offsets (from the rectangle corner): vertices (0,0), (delta1,0),
// (delta_star+h, h), (0, delta2). Structures that use fewer parameters are
// the degenerate cases of this quadrilateral (rectangle for A, triangle for
// D/Dp, bottom-edge segment for E/Ep).
struct UnifiedParams {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta_star = 0.0;
  double h = 0.0;
};

// Maps structure-specific parameters to the unified quadrilateral form.
UnifiedParams unify(StructureLabel label, const MechanismParams& p);

}  // namespace menuforge
