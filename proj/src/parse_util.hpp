#pragma once

#include "decolog/signature.hpp"
#include "decolog/terms.hpp"
#include "decolog/types.hpp"
#include "lexer.hpp"

namespace decolog::detail {

Type parse_type(TokenStream& ts, bool allow_meta);

// `sig` may be null, in which case names are not resolved.
Term parse_term(TokenStream& ts, const Signature* sig, bool allow_meta);

std::string read_file(const std::string& path);

}  // namespace decolog::detail
