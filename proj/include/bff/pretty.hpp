#ifndef BFF_PRETTY_HPP
#define BFF_PRETTY_HPP

#include <string>

#include "bff/ast.hpp"

namespace bff {

// Canonical text form; parse(pretty(p)) is structurally equal to p.
std::string pretty(const Program& p);
std::string pretty(const Procedure& p, int indent = 0);
std::string pretty(const Stmt& st, int indent = 0);
std::string pretty(const Expr& e);
std::string pretty(const Term& t);
std::string pretty(const Closure& c);

}  // namespace bff

#endif
