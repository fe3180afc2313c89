#include "ffsym/error.hpp"

namespace ffsym {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Range: return "range";
        case ErrorKind::Io: return "io";
        case ErrorKind::Checksum: return "checksum";
        case ErrorKind::Network: return "network";
        case ErrorKind::Data: return "data";
        case ErrorKind::Relation: return "relation";
    }
    return "unknown";
}

}  // namespace ffsym
