#include "ffsym/coefficient.hpp"

#include "ffsym/error.hpp"

namespace ffsym {

std::string to_decimal(const Coefficient& c) { return c.str(); }

Coefficient parse_decimal(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
        negative = text[0] == '-';
        i = 1;
    }
    if (i == text.size()) throw ParseError("missing digits in integer '" + std::string(text) + "'", i);
    for (std::size_t j = i; j < text.size(); ++j)
        if (text[j] < '0' || text[j] > '9')
            throw ParseError("non-digit '" + std::string(1, text[j]) + "' in integer '" + std::string(text) + "'", j);
    Coefficient value(std::string(text.substr(i)));
    return negative ? Coefficient(-value) : value;
}

}  // namespace ffsym
