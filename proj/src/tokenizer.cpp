#include "geocell/tokenizer.hpp"

namespace geocell
{
namespace
{
bool IsSpace(unsigned char ch)
{
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
}

bool IsPunct(unsigned char ch)
{
  return (ch >= 0x21 && ch <= 0x2f) || (ch >= 0x3a && ch <= 0x40) || (ch >= 0x5b && ch <= 0x60) ||
         (ch >= 0x7b && ch <= 0x7e);
}
}  // namespace

std::string FoldCase(std::string_view s)
{
  std::string out(s);
  for (char & ch : out)
  {
    if (ch >= 'A' && ch <= 'Z')
      ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> Tokenize(std::string_view text)
{
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty())
    {
      tokens.push_back(FoldCase(current));
      current.clear();
    }
  };
  for (char ch : text)
  {
    auto const u = static_cast<unsigned char>(ch);
    if (IsSpace(u))
    {
      flush();
    }
    else if (IsPunct(u))
    {
      flush();
      tokens.emplace_back(1, ch);
    }
    else
    {
      current.push_back(ch);
    }
  }
  flush();
  return tokens;
}
}  // namespace geocell
