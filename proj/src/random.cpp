#include "gnnsteal/random.hpp"

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salt) {
  std::uint64_t h = mix_seed(base);
  for (std::uint64_t s : salt) h = mix_seed(h ^ mix_seed(s + 0x632be59bd9b4e019ULL));
  return h;
}

const char* to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::missing_file: return "missing file";
    case LoadErrorKind::node_out_of_range: return "node id out of range";
    case LoadErrorKind::label_out_of_range: return "label out of class range";
    case LoadErrorKind::bad_number: return "non-numeric value";
    case LoadErrorKind::malformed: return "malformed line";
  }
  return "load error";
}

LoadError::LoadError(LoadErrorKind kind, std::string file, std::size_t line, const std::string& detail)
    : Error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + to_string(kind) +
            (detail.empty() ? std::string{} : " (" + detail + ")")),
      kind_(kind),
      file_(std::move(file)),
      line_(line) {}

BudgetExceeded::BudgetExceeded(std::size_t remaining, std::size_t requested)
    : Error("query budget exceeded: " + std::to_string(requested) + " new nodes requested, " +
            std::to_string(remaining) + " remaining"),
      remaining_(remaining),
      requested_(requested) {}

}  // namespace gnnsteal
