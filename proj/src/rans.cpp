// Copyright (c) the snic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snic/codec/rans.hpp"

namespace snic::codec {

std::vector<uint8_t> rans_encode(const std::vector<int>& symbols,
                                 const std::vector<const CdfTable*>& tables) {
  if (symbols.size() != tables.size())
    throw std::invalid_argument("rans_encode: one table per symbol required");
  RansEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) enc.put_symbol(symbols[i], *tables[i]);
  return enc.finish();
}

std::vector<int> rans_decode(const std::vector<uint8_t>& bytes,
                             const std::vector<const CdfTable*>& tables) {
  RansDecoder dec(bytes);
  std::vector<int> out;
  out.reserve(tables.size());
  for (const CdfTable* t : tables) out.push_back(dec.get_symbol(*t));
  return out;
}

}  // namespace snic::codec
