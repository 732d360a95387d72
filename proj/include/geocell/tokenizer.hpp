#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geocell
{
// Lowercases ASCII letters, splits on whitespace and emits every ASCII
// punctuation character as its own token. Non-ASCII bytes are kept verbatim.
std::vector<std::string> Tokenize(std::string_view text);

std::string FoldCase(std::string_view s);
}  // namespace geocell
