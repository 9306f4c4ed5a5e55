#pragma once

// Structural edits on dependency parses that track token insertions,
// deletions, and span replacements. The corruption generators edit claim
// tokens and keep the parse aligned with these helpers instead of
// re-parsing, so arcs outside the edited region are preserved exactly.
//
// For the basic representation every edit preserves the single-rooted tree
// property. Collapsed parses are edited by generic arc rewriting (no tree
// invariant to maintain).

#include <cstddef>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/types.hpp"

namespace factspan {

namespace detail {

// parent[i] = head of token i, -1 for the root. Basic parses only.
inline std::vector<std::ptrdiff_t> parent_array(const DependencyParse& parse) {
  std::vector<std::ptrdiff_t> parent(parse.token_count, -1);
  for (const Arc& a : parse.arcs) {
    parent[a.child_index] = static_cast<std::ptrdiff_t>(a.head_index);
  }
  return parent;
}

inline std::vector<std::string> relation_array(const DependencyParse& parse) {
  std::vector<std::string> rel(parse.token_count);
  for (const Arc& a : parse.arcs) {
    rel[a.child_index] = a.relation;
  }
  return rel;
}

inline DependencyParse from_parents(const std::vector<std::ptrdiff_t>& parent,
                                    const std::vector<std::string>& rel,
                                    ParseRepr repr) {
  DependencyParse parse;
  parse.token_count = parent.size();
  parse.representation = repr;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] >= 0) {
      parse.arcs.push_back(Arc{static_cast<std::size_t>(parent[i]), i, rel[i]});
    }
  }
  return parse;
}

inline std::vector<std::size_t> depth_array(
    const std::vector<std::ptrdiff_t>& parent) {
  std::vector<std::size_t> depth(parent.size(), 0);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    std::size_t d = 0;
    std::ptrdiff_t cur = parent[i];
    while (cur >= 0) {
      ++d;
      cur = parent[static_cast<std::size_t>(cur)];
    }
    depth[i] = d;
  }
  return depth;
}

}  // namespace detail

// Index of the root token of a basic parse.
inline std::size_t parse_root(const DependencyParse& parse) {
  if (parse.representation != ParseRepr::Basic) {
    throw ValidationError("parse_root: requires basic representation");
  }
  auto parent = detail::parent_array(parse);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] < 0) return i;
  }
  throw ValidationError("parse_root: no root found");
}

// Replaces tokens [begin, end) with new_len tokens. The replacement span is
// represented by its last token, which inherits the external attachment of
// the span's shallowest member; other replacement tokens attach to it with
// inner_relation. Tokens outside the span keep their arcs, re-indexed.
inline DependencyParse splice_span(const DependencyParse& parse,
                                   std::size_t begin, std::size_t end,
                                   std::size_t new_len,
                                   const std::string& inner_relation = "compound") {
  const std::size_t n = parse.token_count;
  if (begin >= end || end > n) {
    throw ValidationError("splice_span: bad span [" + std::to_string(begin) +
                          ", " + std::to_string(end) + ") for " +
                          std::to_string(n) + " tokens");
  }
  if (new_len == 0) {
    throw ValidationError("splice_span: replacement must be non-empty");
  }
  const std::size_t new_n = n - (end - begin) + new_len;
  const std::size_t rep = begin + new_len - 1;
  auto in_span = [&](std::ptrdiff_t i) {
    return i >= static_cast<std::ptrdiff_t>(begin) &&
           i < static_cast<std::ptrdiff_t>(end);
  };
  auto remap = [&](std::size_t i) {
    return i < begin ? i : i - (end - begin) + new_len;
  };

  if (parse.representation == ParseRepr::Collapsed) {
    DependencyParse out;
    out.token_count = new_n;
    out.representation = ParseRepr::Collapsed;
    std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
    for (const Arc& a : parse.arcs) {
      const bool head_in = in_span(static_cast<std::ptrdiff_t>(a.head_index));
      const bool child_in = in_span(static_cast<std::ptrdiff_t>(a.child_index));
      if (head_in && child_in) continue;
      const std::size_t h = head_in ? rep : remap(a.head_index);
      const std::size_t c = child_in ? rep : remap(a.child_index);
      if (h == c) continue;
      if (seen.insert({h, c, a.relation}).second) {
        out.arcs.push_back(Arc{h, c, a.relation});
      }
    }
    for (std::size_t i = begin; i < rep; ++i) {
      out.arcs.push_back(Arc{rep, i, inner_relation});
    }
    return out;
  }

  auto parent = detail::parent_array(parse);
  auto rel = detail::relation_array(parse);
  auto depth = detail::depth_array(parent);

  // The span node nearest the root decides the replacement's attachment.
  // Its parent is outside the span (or it is the root), and the depth
  // argument rules out cycles through re-attached neighbours.
  std::size_t shallowest = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (depth[i] < depth[shallowest]) shallowest = i;
  }

  std::vector<std::ptrdiff_t> new_parent(new_n, -1);
  std::vector<std::string> new_rel(new_n);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_span(static_cast<std::ptrdiff_t>(i))) continue;
    const std::size_t ni = remap(i);
    if (parent[i] < 0) {
      new_parent[ni] = -1;
    } else if (in_span(parent[i])) {
      new_parent[ni] = static_cast<std::ptrdiff_t>(rep);
    } else {
      new_parent[ni] =
          static_cast<std::ptrdiff_t>(remap(static_cast<std::size_t>(parent[i])));
    }
    new_rel[ni] = rel[i];
  }
  if (parent[shallowest] < 0) {
    new_parent[rep] = -1;
  } else {
    new_parent[rep] = static_cast<std::ptrdiff_t>(
        remap(static_cast<std::size_t>(parent[shallowest])));
    new_rel[rep] = rel[shallowest];
  }
  for (std::size_t i = begin; i < rep; ++i) {
    new_parent[i] = static_cast<std::ptrdiff_t>(rep);
    new_rel[i] = inner_relation;
  }
  return detail::from_parents(new_parent, new_rel, ParseRepr::Basic);
}

// Inserts count tokens at position pos, all attached to the token that had
// index attach_to before the insertion.
inline DependencyParse insert_tokens(const DependencyParse& parse,
                                     std::size_t pos, std::size_t count,
                                     std::size_t attach_to,
                                     const std::string& relation) {
  const std::size_t n = parse.token_count;
  if (pos > n) {
    throw ValidationError("insert_tokens: position out of range");
  }
  if (attach_to >= n) {
    throw ValidationError("insert_tokens: attachment token out of range");
  }
  auto remap = [&](std::size_t i) { return i < pos ? i : i + count; };
  DependencyParse out;
  out.token_count = n + count;
  out.representation = parse.representation;
  for (const Arc& a : parse.arcs) {
    out.arcs.push_back(Arc{remap(a.head_index), remap(a.child_index), a.relation});
  }
  for (std::size_t k = 0; k < count; ++k) {
    out.arcs.push_back(Arc{remap(attach_to), pos + k, relation});
  }
  return out;
}

// Removes the token at pos. In a basic parse its children re-attach to its
// head; when the root is removed, its first child becomes the new root and
// the remaining children attach there. Collapsed parses drop incident arcs.
inline DependencyParse erase_token(const DependencyParse& parse, std::size_t pos) {
  const std::size_t n = parse.token_count;
  if (pos >= n) {
    throw ValidationError("erase_token: position out of range");
  }
  if (n == 1) {
    throw ValidationError("erase_token: cannot erase the only token");
  }
  auto remap = [&](std::size_t i) { return i < pos ? i : i - 1; };

  if (parse.representation == ParseRepr::Collapsed) {
    DependencyParse out;
    out.token_count = n - 1;
    out.representation = ParseRepr::Collapsed;
    for (const Arc& a : parse.arcs) {
      if (a.head_index == pos || a.child_index == pos) continue;
      out.arcs.push_back(Arc{remap(a.head_index), remap(a.child_index), a.relation});
    }
    return out;
  }

  auto parent = detail::parent_array(parse);
  auto rel = detail::relation_array(parse);
  std::ptrdiff_t new_home = parent[pos];  // -1 when erasing the root
  if (new_home < 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != pos && parent[i] == static_cast<std::ptrdiff_t>(pos)) {
        new_home = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
  }
  std::vector<std::ptrdiff_t> new_parent(n - 1, -1);
  std::vector<std::string> new_rel(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == pos) continue;
    const std::size_t ni = remap(i);
    std::ptrdiff_t p = parent[i];
    if (p == static_cast<std::ptrdiff_t>(pos)) {
      p = parent[pos] >= 0 ? parent[pos] : new_home;
      if (p == static_cast<std::ptrdiff_t>(i)) p = -1;  // promoted child
      new_rel[ni] = p < 0 ? std::string() : rel[i];
    } else {
      new_rel[ni] = rel[i];
    }
    new_parent[ni] =
        p < 0 ? -1 : static_cast<std::ptrdiff_t>(remap(static_cast<std::size_t>(p)));
  }
  return detail::from_parents(new_parent, new_rel, ParseRepr::Basic);
}

}  // namespace factspan
