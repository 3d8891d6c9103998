#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace multifrac {

/// The alphabet {1, ..., s} with s >= 2.
class Alphabet {
 public:
  explicit Alphabet(int size);

  int size() const noexcept { return size_; }
  bool contains(int symbol) const noexcept { return symbol >= 1 && symbol <= size_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int size_;
};

/// Upper limit on the number of words a single enumeration may visit,
/// expressed as the natural log of the count.
struct EnumerationBudget {
  double max_log_count = 24.0 * std::numbers::ln2;

  /// Throws BudgetError when s^length words exceed the budget.
  void check(const Alphabet& alphabet, int length) const;
  bool allows(const Alphabet& alphabet, int length) const noexcept;
};

/// Finite word over an alphabet. Symbols are 1-based; positions 0-based.
/// The empty word is allowed as an internal value (empty tails); public
/// operations that need a nonempty word say so.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> symbols) : symbols_(std::move(symbols)) {}
  Word(std::initializer_list<int> symbols) : symbols_(symbols) {}

  /// The word a^count.
  static Word repeated(int symbol, std::size_t count);

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  int front() const { return symbols_.front(); }
  int back() const { return symbols_.back(); }
  std::span<const int> symbols() const noexcept { return symbols_; }

  void push_back(int symbol) { symbols_.push_back(symbol); }
  void pop_back() { symbols_.pop_back(); }

  Word prefix(std::size_t n) const;
  Word drop_front(std::size_t k) const;
  Word extended(int symbol) const;

  /// Throws ValidationError if some symbol is outside the alphabet.
  void validate(const Alphabet& alphabet) const;

  /// Comma separated symbols, e.g. "1,2,2".
  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    return a.symbols_ <=> b.symbols_;
  }

 private:
  std::vector<int> symbols_;
};

Word concat(const Word& a, const Word& b);

/// The infinite point gamma gamma gamma ... for a nonempty word gamma.
struct PeriodicPoint {
  Word period;

  explicit PeriodicPoint(Word w);
  int symbol_at(std::size_t k) const { return period[k % period.size()]; }
};

/// Base-s rank of a word in lexicographic order (0-based).
std::size_t word_index(std::span<const int> symbols, int s) noexcept;
Word word_from_index(std::size_t index, std::size_t length, int s);

/// s^n as an integer.
std::size_t ipow(int s, std::size_t n) noexcept;

/// All words of length n in lexicographic order.
std::vector<Word> enumerate_words(const Alphabet& alphabet, int n,
                                  const EnumerationBudget& budget = {});

/// Visits every word of length n in lexicographic order. The callback
/// receives a span into a reused buffer.
template <class Fn>
void for_each_word(const Alphabet& alphabet, int n, Fn&& fn,
                   const EnumerationBudget& budget = {}) {
  budget.check(alphabet, n);
  std::vector<int> buf(static_cast<std::size_t>(n), 1);
  const int s = alphabet.size();
  while (true) {
    fn(std::span<const int>(buf));
    int pos = n - 1;
    while (pos >= 0 && buf[pos] == s) {
      buf[pos] = 1;
      --pos;
    }
    if (pos < 0) return;
    ++buf[pos];
  }
}

}  // namespace multifrac
