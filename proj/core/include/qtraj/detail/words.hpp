// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "qtraj/error.hpp"

namespace qtraj {

template <class Visit>
void for_each_word(const KrausMeasure& m, int n, std::uint64_t budget, Visit&& visit) {
  if (n < 0) throw Error(ErrorKind::kInvalidInput, "word length must be non-negative");
  const std::vector<int>& support = m.support();
  const auto letters = static_cast<std::uint64_t>(support.size());
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (letters != 0 && count > budget / letters) {
      std::ostringstream msg;
      msg << "enumerating " << letters << "^" << n << " words exceeds the budget of " << budget
          << "; use the Monte Carlo path instead";
      throw Error(ErrorKind::kBudget, msg.str());
    }
    count *= letters;
  }
  const int k = m.dim();
  std::vector<int> word(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    visit(word, 1.0, ComplexMatrix::Identity(k, k).eval());
    return;
  }
  if (letters == 0) return;
  // prefix[d] = v_{w_d} ... v_{w_1}, weight[d] the matching weight product.
  std::vector<ComplexMatrix> prefix(static_cast<std::size_t>(n) + 1);
  std::vector<double> weight(static_cast<std::size_t>(n) + 1, 1.0);
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  prefix[0] = ComplexMatrix::Identity(k, k);
  int depth = 0;
  while (true) {
    // Extend to full length with the current digits.
    for (; depth < n; ++depth) {
      const auto& e = m.elements()[support[digit[depth]]];
      prefix[depth + 1].noalias() = e.matrix * prefix[depth];
      weight[depth + 1] = weight[depth] * e.weight;
      word[depth] = support[digit[depth]];
    }
    visit(word, weight[n], prefix[n]);
    // Odometer increment from the last letter.
    int pos = n - 1;
    while (pos >= 0 && ++digit[pos] == static_cast<int>(letters)) {
      digit[pos] = 0;
      --pos;
    }
    if (pos < 0) return;
    depth = pos;
  }
}

}  // namespace qtraj
