#include "flecs/literal.hpp"

namespace flecs {

namespace {
// FNV-1a over the rendered fields; stable across runs, so trace output and
// state signatures are reproducible.
std::size_t fnv1a(std::size_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= 0xff;
  h *= 1099511628211ULL;
  return h;
}
constexpr std::size_t kFnvBasis = 1469598103934665603ULL;
}  // namespace

std::string Atom::str() const {
  std::string s = "(" + pred;
  for (const auto& a : args) s += " " + a;
  s += ")";
  return s;
}

std::string Literal::str() const {
  return positive ? atom.str() : "(not " + atom.str() + ")";
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
  std::size_t h = fnv1a(kFnvBasis, a.pred);
  for (const auto& arg : a.args) h = fnv1a(h, arg);
  return h;
}

std::size_t LiteralHash::operator()(const Literal& l) const noexcept {
  std::size_t h = AtomHash{}(l.atom);
  return l.positive ? h : ~h;
}

}  // namespace flecs
