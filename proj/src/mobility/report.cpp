#include "mobsim/mobility/report.hpp"

namespace mobsim::mobility {

std::string_view to_string(HandoverKind k) {
  switch (k) {
    case HandoverKind::mipv6: return "mipv6";
    case HandoverKind::returning_home: return "home";
    case HandoverKind::intra_domain: return "intra-domain";
    case HandoverKind::inter_domain: return "inter-domain";
    case HandoverKind::shuffling: return "shuffling";
  }
  return "?";
}

}  // namespace mobsim::mobility
