#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cgaudit {

/// Folds a name into its lookup key: lowercased, Latin diacritics stripped,
/// surrounding whitespace removed and internal whitespace runs collapsed to a
/// single space. Invalid UTF-8 bytes become U+FFFD so the result is always
/// valid UTF-8 and fold_name(fold_name(x)) == fold_name(x).
std::string fold_name(std::string_view raw);

/// Given-name token of a "Given [Middle ...] Family" name.
struct GivenToken {
    std::string token;
    bool initials_only = false;
};

/// First whitespace-delimited token with trailing punctuation removed.
/// `initials_only` is set when every token before the family name is an
/// initial ("J.", "J", "J.-P."). A trailing numeric disambiguation suffix
/// ("Wei Wang 0001") is not treated as the family name.
/// Throws std::invalid_argument on an empty or all-whitespace name.
GivenToken extract_given_token(std::string_view full_name);

/// True for tokens made only of single letters, each optionally followed by
/// '.' or '-' ("J.", "J.H.", "J.-P").
bool is_initial_token(std::string_view token);

std::vector<std::string_view> split_whitespace(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace cgaudit
