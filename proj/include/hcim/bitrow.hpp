// bitrow.hpp -- packed one-bit-per-column rows.
//
// A BitRow holds one bit plane across the macro columns, packed 64 bits
// per word so an AND-reduce over 144 columns is three AND+popcount steps.
// Unused tail bits are always zero.
#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "hcim/errors.hpp"

namespace hcim {

class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(int n) : n_(n), words_((n + 63) / 64, 0) {}

  int size() const { return n_; }

  void set(int i, bool v) {
    uint64_t bit = 1ull << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  friend int64_t and_popcount(const BitRow& x, const BitRow& y) {
    if (x.n_ != y.n_) throw ShapeError("and_popcount: row lengths differ");
    int64_t acc = 0;
    for (size_t w = 0; w < x.words_.size(); ++w)
      acc += std::popcount(x.words_[w] & y.words_[w]);
    return acc;
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace hcim
