#include "multifrac/symbolic.hpp"

#include <cmath>

#include "multifrac/errors.hpp"

namespace multifrac {

Alphabet::Alphabet(int size) : size_(size) {
  if (size < 2) throw ValidationError("alphabet size must be at least 2, got " + std::to_string(size));
}

bool EnumerationBudget::allows(const Alphabet& alphabet, int length) const noexcept {
  return length >= 0 && length * std::log(static_cast<double>(alphabet.size())) <= max_log_count + 1e-12;
}

void EnumerationBudget::check(const Alphabet& alphabet, int length) const {
  if (length < 0) throw ValidationError("word length must be nonnegative");
  if (!allows(alphabet, length)) {
    throw BudgetError("enumeration of " + std::to_string(alphabet.size()) + "^" +
                      std::to_string(length) + " words exceeds the budget of exp(" +
                      std::to_string(max_log_count) + ")");
  }
}

Word Word::repeated(int symbol, std::size_t count) {
  return Word(std::vector<int>(count, symbol));
}

Word Word::prefix(std::size_t n) const {
  if (n > size()) n = size();
  return Word(std::vector<int>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::drop_front(std::size_t k) const {
  if (k > size()) k = size();
  return Word(std::vector<int>(symbols_.begin() + static_cast<std::ptrdiff_t>(k), symbols_.end()));
}

Word Word::extended(int symbol) const {
  Word w = *this;
  w.push_back(symbol);
  return w;
}

void Word::validate(const Alphabet& alphabet) const {
  for (int c : symbols_) {
    if (!alphabet.contains(c)) {
      throw ValidationError("symbol " + std::to_string(c) + " outside alphabet {1.." +
                            std::to_string(alphabet.size()) + "}");
    }
  }
}

std::string Word::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(symbols_[i]);
  }
  return out;
}

Word concat(const Word& a, const Word& b) {
  std::vector<int> v(a.symbols().begin(), a.symbols().end());
  v.insert(v.end(), b.symbols().begin(), b.symbols().end());
  return Word(std::move(v));
}

PeriodicPoint::PeriodicPoint(Word w) : period(std::move(w)) {
  if (period.empty()) throw ValidationError("periodic point needs a nonempty period");
}

std::size_t word_index(std::span<const int> symbols, int s) noexcept {
  std::size_t idx = 0;
  for (int c : symbols) idx = idx * static_cast<std::size_t>(s) + static_cast<std::size_t>(c - 1);
  return idx;
}

Word word_from_index(std::size_t index, std::size_t length, int s) {
  std::vector<int> v(length);
  for (std::size_t i = length; i-- > 0;) {
    v[i] = static_cast<int>(index % static_cast<std::size_t>(s)) + 1;
    index /= static_cast<std::size_t>(s);
  }
  return Word(std::move(v));
}

std::size_t ipow(int s, std::size_t n) noexcept {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= static_cast<std::size_t>(s);
  return r;
}

std::vector<Word> enumerate_words(const Alphabet& alphabet, int n, const EnumerationBudget& budget) {
  if (n < 1) throw ValidationError("enumerate_words needs n >= 1");
  std::vector<Word> out;
  out.reserve(ipow(alphabet.size(), static_cast<std::size_t>(n)));
  for_each_word(
      alphabet, n,
      [&](std::span<const int> w) { out.emplace_back(std::vector<int>(w.begin(), w.end())); },
      budget);
  return out;
}

}  // namespace multifrac
