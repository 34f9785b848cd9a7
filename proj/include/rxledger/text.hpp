#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

/// Ordered set of normalized terms. Ordering keeps joins and storage stable.
using TermSet = std::set<std::string>;

/// Lowercased ASCII alphanumeric runs of `text`, in order of appearance.
/// Every other byte (punctuation, whitespace, non-ASCII) separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Shared term normalization: tokenize, then deduplicate.
TermSet normalize_terms(std::string_view text);

/// Space-joined terms; normalize_terms(join_terms(s)) == s.
std::string join_terms(const TermSet& terms);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

/// True when the token sequence `needle` occurs contiguously in `haystack`.
bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle);

}  // namespace rxledger
