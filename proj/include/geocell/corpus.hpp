#pragma once

#include "geocell/cellgrid.hpp"

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geocell
{
inline constexpr size_t kDefaultMaxContext = 400;

// Half-open token range [start, end).
struct TokenSpan
{
  size_t start = 0;
  size_t end = 0;

  size_t size() const { return end - start; }
  bool Contains(TokenSpan const & other) const { return start <= other.start && other.end <= end; }
  friend auto operator<=>(TokenSpan const &, TokenSpan const &) = default;
};

struct TrainingExample
{
  std::vector<std::string> context_tokens;
  std::vector<TokenSpan> toponym_spans;
  TokenSpan target_span;
  LatLng gold;

  friend bool operator==(TrainingExample const &, TrainingExample const &) = default;
};

struct EvalRecord
{
  std::string dataset_id;
  std::string doc_id;
  // Surface form used for gazetteer lookup; defaults to the target tokens.
  std::string mention;
  TrainingExample example;
  std::optional<std::string> entity_key;

  friend bool operator==(EvalRecord const &, EvalRecord const &) = default;
};

struct CoordinatePatch
{
  std::string entity_key;
  LatLng coord;
  std::optional<LatLng> expected_old;
};

struct PatchReport
{
  size_t applied = 0;
  size_t mismatched = 0;
  // Indices of records whose gold disagreed with the patch's expected_old.
  std::vector<size_t> flagged;
  std::vector<std::string> warnings;
};

// Throws ValidationError when spans are empty, out of bounds, the target is
// not one of the toponym spans, or the context exceeds max_context.
void Validate(TrainingExample const & example, size_t max_context = kDefaultMaxContext);

std::string TargetSurface(TrainingExample const & example);

// Streams training examples from a JSONL file, one validated record per call.
class TrainingReader
{
public:
  explicit TrainingReader(std::string path, size_t max_context = kDefaultMaxContext);

  std::optional<TrainingExample> Next();
  size_t line() const { return m_line; }

private:
  std::string m_path;
  std::ifstream m_in;
  size_t m_maxContext;
  size_t m_line = 0;
};

std::vector<TrainingExample> LoadTraining(std::string const & path,
                                          size_t max_context = kDefaultMaxContext);
std::vector<EvalRecord> LoadEval(std::string const & path, size_t max_context = kDefaultMaxContext);

void WriteTraining(std::ostream & out, std::span<TrainingExample const> examples);
void WriteEval(std::ostream & out, std::span<EvalRecord const> records);

std::vector<CoordinatePatch> LoadPatches(std::string const & path);

// Replaces gold coordinates of records whose entity_key has a patch. A patch
// whose expected_old differs from the current gold by more than 1e-6 degrees
// is still applied but the record is flagged.
std::vector<EvalRecord> ApplyPatches(std::vector<EvalRecord> records,
                                     std::span<CoordinatePatch const> patches, PatchReport & report);

struct ContextWindow
{
  TrainingExample example;
  // Token offset of the window inside the document.
  size_t offset = 0;
  // The target sentence alone exceeded the budget and was cut.
  bool truncated = false;
};

// Builds a window of whole sentences around the target. Sentences are added
// alternately before and after the target sentence, preceding side first;
// a side stops once its next sentence no longer fits in max_tokens.
// Toponym spans not fully inside the window are dropped.
ContextWindow MakeContextWindow(std::span<std::string const> doc_tokens,
                                std::span<TokenSpan const> sentences,
                                std::span<TokenSpan const> toponym_spans, TokenSpan target_span,
                                LatLng gold, size_t max_tokens = kDefaultMaxContext);
}  // namespace geocell
