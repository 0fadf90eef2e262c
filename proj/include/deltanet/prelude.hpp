#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltanet/term.hpp"

namespace deltanet {

/// Church numeral λs.λz.s (... (s z)).
Term church_numeral(unsigned n);

/// The value of `n` if `t` is α-equivalent to a Church numeral.
std::optional<unsigned> church_value(const Term& t);

/// Named closed definitions: I, K, S, zero .. ten, succ, add, mul, exp.
std::optional<Term> prelude_definition(std::string_view name);
std::vector<std::string> prelude_names();

/// Replaces free occurrences of prelude names in `t` by their definitions.
Term apply_prelude(const Term& t);

}  // namespace deltanet
