#ifndef CARDWAVE_MODELS_DETAIL_HPP
#define CARDWAVE_MODELS_DETAIL_HPP

#include "cardwave/ionic.hpp"

#include <memory>

namespace cardwave::detail {

std::shared_ptr<const CellModel> make_aliev_panfilov();
std::shared_ptr<const CellModel> make_ohara_rudy(int celltype); // 0 endo, 1 epi, 2 mid
std::shared_ptr<const CellModel> make_maccannell();

} // namespace cardwave::detail

#endif
