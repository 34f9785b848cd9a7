#include "rxledger/text.hpp"

#include <algorithm>

namespace rxledger {

namespace {

bool is_ascii_alnum(unsigned char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ascii_lower(unsigned char c) noexcept {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_ascii_alnum(c)) {
            current.push_back(ascii_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

TermSet normalize_terms(std::string_view text) {
    auto tokens = tokenize(text);
    return TermSet(std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
}

std::string join_terms(const TermSet& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return ascii_lower(c); });
    return out;
}

std::string trim(std::string_view text) {
    const auto not_space = [](unsigned char c) {
        return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v');
    };
    auto first = std::find_if(text.begin(), text.end(), not_space);
    auto last = std::find_if(text.rbegin(), text.rend(), not_space).base();
    return first < last ? std::string(first, last) : std::string{};
}

bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

}  // namespace rxledger
