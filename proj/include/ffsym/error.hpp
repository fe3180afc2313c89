#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ffsym {

/// Coarse error classes. The CLI prints these verbatim so scripts can branch on them.
enum class ErrorKind {
    Usage,
    Parse,
    Range,
    Io,
    Checksum,
    Network,
    Data,
    Relation,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure with the 0-based offset of the first offending character
/// (or line number, for file parsers) when one is known.
class ParseError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    ParseError(const std::string& what, std::size_t position = npos)
        : Error(ErrorKind::Parse, what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace ffsym
