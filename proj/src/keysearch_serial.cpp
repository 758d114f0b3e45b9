#include "keysearch_kernel.hpp"

namespace satqkd {

SklResult optimise_key_length_serial(const BlockStats& block, const SecurityConfig& sec) {
  if (!detail::searchable(block)) return detail::empty_result(block);
  const detail::KeySearch ks(block, sec);
  bool found = false;
  std::size_t bb = 0, bj = 0, bi = 0;
  detail::KeySearch::Point best;
  for (std::size_t b = 0; b < ks.beta.size(); ++b)
    for (std::size_t j = 0; j < ks.nu.size(); ++j)
      for (std::size_t i = 0; i < ks.frac.size(); ++i) {
        const auto p = ks.evaluate(b, j, i);
        if (!p.feasible) continue;
        if (!found || p.ell > best.ell) {
          found = true;
          best = p;
          bb = b, bj = j, bi = i;
        }
      }
  if (!found) return detail::empty_result(block);
  return ks.result(bb, bj, bi, best, sec);
}

}  // namespace satqkd
