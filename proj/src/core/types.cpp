#include "tmpfc/types.hpp"

#include "tmpfc/error.hpp"
#include "tmpfc/simd/kernels.hpp"

namespace tmpfc {

std::string_view to_string(Territory t) {
  switch (t) {
    case Territory::LAD: return "LAD";
    case Territory::LCX: return "LCX";
    case Territory::RCA: return "RCA";
  }
  return "?";
}

Territory parse_territory(std::string_view s) {
  if (s == "LAD") return Territory::LAD;
  if (s == "LCX") return Territory::LCX;
  if (s == "RCA") return Territory::RCA;
  throw Error(ErrorCode::UnknownTerritory, "territory '" + std::string(s) + "' is not one of LAD, LCX, RCA");
}

std::string_view to_string(GroupLabel g) {
  switch (g) {
    case GroupLabel::A_obstructive: return "A_obstructive";
    case GroupLabel::B_cmvd: return "B_cmvd";
    case GroupLabel::C_control: return "C_control";
  }
  return "?";
}

std::optional<GroupLabel> parse_group_label(std::string_view s) {
  if (s == "A_obstructive") return GroupLabel::A_obstructive;
  if (s == "B_cmvd") return GroupLabel::B_cmvd;
  if (s == "C_control") return GroupLabel::C_control;
  return std::nullopt;
}

std::size_t BinaryGrid::checked_size(int w, int h) {
  if (w < 0 || h < 0) throw Error(ErrorCode::InvalidParams, "negative grid dimension");
  return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

std::size_t BinaryGrid::count() const { return simd::active().count_nonzero(px_); }

}  // namespace tmpfc
